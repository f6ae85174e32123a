//! Diagnostics: positioned, coded errors and warnings, plus rendering.
//!
//! Every check in the pipeline reports through [`Diagnostic`]. Codes are a
//! closed, published set ([`DiagCode`]); renderers never invent new ones.

use crate::span::SourceSpan;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

/// Stable diagnostic codes.
///
/// The string form (`as_str`) is part of the tool's output contract: scripts
/// may match on it, so variants are append-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagCode {
    // lexical
    UnterminatedString,
    UnterminatedComment,
    IllegalCharacter,
    // syntax
    UnexpectedToken,
    UnbalancedBraces,
    MultipleTopLevelStatements,
    NotAModuleOrSubmodule,
    // statement-tree construction
    MissingMandatorySubstatement,
    DuplicateSubstatement,
    MisplacedSubstatement,
    MissingNamespaceOrPrefix,
    ListWithoutDataDef,
    InvalidArgument,
    MissingRevision,
    // linkage resolution
    SpecificationNotFound,
    ImportOfSubmodule,
    IncludeOfModule,
    BelongsToMismatch,
    DuplicatePrefix,
    CircularImport,
    // type system
    UnknownType,
    CircularTypedef,
    UnknownPrefix,
    RestrictionWidensBase,
    RestrictionKindMismatch,
    DefaultOutOfRange,
    DefaultSyntaxError,
    DefaultNotAnEnumMember,
    // whole-specification checks
    UnknownExtension,
    ExtensionArgumentMismatch,
    UnknownGrouping,
    CircularGroupingUse,
    DuplicateSiblingName,
    RefinementTargetNotFound,
    RefinementKindMismatch,
    AugmentTargetNotFound,
    AugmentPayloadMismatch,
    AugmentNameCollision,
    PathStepNotFound,
    KeyLeafNotFound,
    DuplicateKeyComponent,
    KeyrefTargetInvalid,
    UniqueComponentNotFound,
    UniqueComponentNotALeaf,
    DuplicateUniqueComponent,
    ChoiceDefaultUnknown,
    // driver
    UsageError,
    FileNotReadable,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        use DiagCode::*;
        match self {
            UnterminatedString => "UNTERMINATED_STRING",
            UnterminatedComment => "UNTERMINATED_COMMENT",
            IllegalCharacter => "ILLEGAL_CHARACTER",
            UnexpectedToken => "UNEXPECTED_TOKEN",
            UnbalancedBraces => "UNBALANCED_BRACES",
            MultipleTopLevelStatements => "MULTIPLE_TOP_LEVEL",
            NotAModuleOrSubmodule => "NOT_A_MODULE",
            MissingMandatorySubstatement => "MISSING_MANDATORY",
            DuplicateSubstatement => "DUP_SUBSTATEMENT",
            MisplacedSubstatement => "MISPLACED_SUBSTATEMENT",
            MissingNamespaceOrPrefix => "MISSING_NAMESPACE_OR_PREFIX",
            ListWithoutDataDef => "LIST_WITHOUT_DATADEF",
            InvalidArgument => "INVALID_ARGUMENT",
            MissingRevision => "MISSING_REVISION",
            SpecificationNotFound => "SPEC_NOT_FOUND",
            ImportOfSubmodule => "IMPORT_OF_SUBMODULE",
            IncludeOfModule => "INCLUDE_OF_MODULE",
            BelongsToMismatch => "BELONGS_TO_MISMATCH",
            DuplicatePrefix => "DUP_PREFIX",
            CircularImport => "CIRCULAR_IMPORT",
            UnknownType => "UNKNOWN_TYPE",
            CircularTypedef => "CIRCULAR_TYPEDEF",
            UnknownPrefix => "UNKNOWN_PREFIX",
            RestrictionWidensBase => "RESTRICTION_WIDENS_BASE",
            RestrictionKindMismatch => "RESTRICTION_KIND_MISMATCH",
            DefaultOutOfRange => "DEFAULT_OUT_OF_RANGE",
            DefaultSyntaxError => "DEFAULT_SYNTAX",
            DefaultNotAnEnumMember => "DEFAULT_NOT_ENUM_MEMBER",
            UnknownExtension => "UNKNOWN_EXTENSION",
            ExtensionArgumentMismatch => "EXT_ARG_MISMATCH",
            UnknownGrouping => "UNKNOWN_GROUPING",
            CircularGroupingUse => "CIRCULAR_GROUPING",
            DuplicateSiblingName => "DUP_SIBLING_NAME",
            RefinementTargetNotFound => "REFINE_TARGET_NOT_FOUND",
            RefinementKindMismatch => "REFINE_KIND_MISMATCH",
            AugmentTargetNotFound => "AUGMENT_TARGET_NOT_FOUND",
            AugmentPayloadMismatch => "AUGMENT_PAYLOAD_MISMATCH",
            AugmentNameCollision => "AUGMENT_NAME_COLLISION",
            PathStepNotFound => "PATH_STEP_NOT_FOUND",
            KeyLeafNotFound => "KEY_LEAF_NOT_FOUND",
            DuplicateKeyComponent => "DUP_KEY_COMPONENT",
            KeyrefTargetInvalid => "KEYREF_TARGET_INVALID",
            UniqueComponentNotFound => "UNIQUE_COMPONENT_NOT_FOUND",
            UniqueComponentNotALeaf => "UNIQUE_COMPONENT_NOT_LEAF",
            DuplicateUniqueComponent => "DUP_UNIQUE_COMPONENT",
            ChoiceDefaultUnknown => "CHOICE_DEFAULT_UNKNOWN",
            UsageError => "USAGE",
            FileNotReadable => "FILE_NOT_READABLE",
        }
    }

    /// Advisory findings are warnings; every other code is an error.
    pub fn severity(self) -> Severity {
        match self {
            DiagCode::MissingRevision => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
    /// Secondary positions, e.g. the first occurrence for a duplicate.
    pub related: Vec<SourceSpan>,
}

impl Diagnostic {
    pub fn new(code: DiagCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            message: message.into(),
            span,
            related: Vec::new(),
        }
    }

    pub fn with_related(mut self, span: SourceSpan) -> Self {
        self.related.push(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// An ordered diagnostic collection; emission order is preserved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    items: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn new() -> Self {
        Diagnostics::default()
    }

    pub fn push(&mut self, diag: Diagnostic) {
        self.items.push(diag);
    }

    pub fn report(&mut self, code: DiagCode, span: SourceSpan, message: impl Into<String>) {
        self.push(Diagnostic::new(code, span, message));
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.items.extend(other.items);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Diagnostic> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Diagnostic] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<Diagnostic> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.items.iter().any(Diagnostic::is_error)
    }

    pub fn error_count(&self) -> usize {
        self.items.iter().filter(|d| d.is_error()).count()
    }

    pub fn has_code(&self, code: DiagCode) -> bool {
        self.items.iter().any(|d| d.code == code)
    }
}

impl IntoIterator for Diagnostics {
    type Item = Diagnostic;
    type IntoIter = std::vec::IntoIter<Diagnostic>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

impl<'a> IntoIterator for &'a Diagnostics {
    type Item = &'a Diagnostic;
    type IntoIter = std::slice::Iter<'a, Diagnostic>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    /// `file:line:col: severity[CODE]: message`, one line per diagnostic.
    Human,
    /// One JSON record per line with fields file, line, col, severity, code, message.
    Machine,
}

/// Render diagnostics in the given order, one line each.
pub fn render(diags: &[Diagnostic], format: RenderFormat) -> String {
    let mut out = String::new();
    for d in diags {
        match format {
            RenderFormat::Human => {
                out.push_str(&format!(
                    "{}:{}:{}: {}[{}]: {}",
                    d.span.file,
                    d.span.start_line,
                    d.span.start_col,
                    d.severity,
                    d.code.as_str(),
                    d.message
                ));
                for r in &d.related {
                    out.push_str(&format!(" (see {})", r));
                }
                out.push('\n');
            }
            RenderFormat::Machine => {
                let record = serde_json::json!({
                    "file": d.span.file.as_ref(),
                    "line": d.span.start_line,
                    "col": d.span.start_col,
                    "severity": d.severity.to_string(),
                    "code": d.code.as_str(),
                    "message": d.message,
                });
                out.push_str(&record.to_string());
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(code: DiagCode, line: u32, msg: &str) -> Diagnostic {
        Diagnostic::new(code, SourceSpan::point("router.yang", line, 3), msg)
    }

    #[test]
    fn human_line_format() {
        let d = diag(DiagCode::DuplicatePrefix, 3, "prefix `yang` already bound");
        let out = render(&[d], RenderFormat::Human);
        assert_eq!(
            out,
            "router.yang:3:3: error[DUP_PREFIX]: prefix `yang` already bound\n"
        );
    }

    #[test]
    fn empty_list_renders_empty() {
        assert_eq!(render(&[], RenderFormat::Human), "");
        assert_eq!(render(&[], RenderFormat::Machine), "");
    }

    #[test]
    fn order_is_preserved_for_mixed_severities() {
        let w = diag(DiagCode::MissingRevision, 1, "no revision");
        let e = diag(DiagCode::UnknownType, 9, "unknown type");
        let out = render(&[w.clone(), e.clone()], RenderFormat::Human);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("warning[MISSING_REVISION]"));
        assert!(lines[1].contains("error[UNKNOWN_TYPE]"));
    }

    #[test]
    fn machine_records_have_exact_fields() {
        let d = diag(DiagCode::UnknownType, 4, "no such type");
        let out = render(&[d], RenderFormat::Machine);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["code", "col", "file", "line", "message", "severity"]);
        assert_eq!(obj["file"], "router.yang");
        assert_eq!(obj["line"], 4);
        assert_eq!(obj["code"], "UNKNOWN_TYPE");
    }

    #[test]
    fn distinct_positions_render_distinct_lines() {
        let a = diag(DiagCode::UnknownType, 4, "same message");
        let b = diag(DiagCode::UnknownType, 5, "same message");
        let out = render(&[a, b], RenderFormat::Human);
        let lines: Vec<&str> = out.lines().collect();
        assert_ne!(lines[0], lines[1]);
    }
}
