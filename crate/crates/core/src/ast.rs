//! Typed abstract syntax for YANG specifications.
//!
//! These types mirror the statement classes of the language: a
//! [`Specification`] (module or submodule) with headers, meta statements,
//! linkage, revisions and bodies. All nodes are plain immutable data; a
//! built tree is safe to share across threads.

use crate::span::SourceSpan;
use crate::syntax::RawStatement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecKind {
    Module,
    Submodule,
}

/// Module or submodule header. Mandatory pieces are `Option` so that a
/// partially valid specification can still be represented; the build pass
/// diagnoses what is missing.
#[derive(Debug, Clone, PartialEq)]
pub enum Header {
    Module {
        namespace: Option<String>,
        prefix: Option<String>,
        yang_version: Option<String>,
    },
    Submodule {
        belongs_to: Option<String>,
        yang_version: Option<String>,
    },
}

/// The four meta statements; each occurs at most once.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metas {
    pub organization: Option<String>,
    pub contact: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub module_name: String,
    pub prefix: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Include {
    pub submodule_name: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Linkage {
    Import(Import),
    Include(Include),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Revision {
    pub date: String,
    pub description: Option<String>,
    pub span: SourceSpan,
}

/// Top-level specification: one per source file.
#[derive(Debug, Clone, PartialEq)]
pub struct Specification {
    pub kind: SpecKind,
    pub name: String,
    pub header: Header,
    pub metas: Metas,
    pub linkages: Vec<Linkage>,
    pub revisions: Vec<Revision>,
    pub bodies: Vec<Body>,
    pub ext_uses: Vec<ExtensionUse>,
    pub span: SourceSpan,
    /// The untyped statement tree the specification was built from; kept for
    /// syntax-level translation (YIN).
    pub raw: RawStatement,
}

impl Specification {
    pub fn imports(&self) -> impl Iterator<Item = &Import> {
        self.linkages.iter().filter_map(|l| match l {
            Linkage::Import(i) => Some(i),
            _ => None,
        })
    }

    pub fn includes(&self) -> impl Iterator<Item = &Include> {
        self.linkages.iter().filter_map(|l| match l {
            Linkage::Include(i) => Some(i),
            _ => None,
        })
    }

    /// The module's own prefix, if declared.
    pub fn own_prefix(&self) -> Option<&str> {
        match &self.header {
            Header::Module { prefix, .. } => prefix.as_deref(),
            Header::Submodule { .. } => None,
        }
    }

    pub fn namespace(&self) -> Option<&str> {
        match &self.header {
            Header::Module { namespace, .. } => namespace.as_deref(),
            Header::Submodule { .. } => None,
        }
    }

    pub fn belongs_to(&self) -> Option<&str> {
        match &self.header {
            Header::Submodule { belongs_to, .. } => belongs_to.as_deref(),
            Header::Module { .. } => None,
        }
    }

    /// Name of the module this specification contributes to: itself for a
    /// module, the `belongs-to` target for a submodule.
    pub fn owning_module(&self) -> &str {
        self.belongs_to().unwrap_or(&self.name)
    }

    pub fn typedefs(&self) -> impl Iterator<Item = &Typedef> {
        self.bodies.iter().filter_map(|b| match b {
            Body::Typedef(t) => Some(t),
            _ => None,
        })
    }

    pub fn groupings(&self) -> impl Iterator<Item = &Grouping> {
        self.bodies.iter().filter_map(|b| match b {
            Body::Grouping(g) => Some(g),
            _ => None,
        })
    }

    pub fn extensions(&self) -> impl Iterator<Item = &Extension> {
        self.bodies.iter().filter_map(|b| match b {
            Body::Extension(e) => Some(e),
            _ => None,
        })
    }
}

/// A body statement of a module or submodule.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Extension(Extension),
    Typedef(Typedef),
    Grouping(Grouping),
    Data(DataDef),
    Rpc(Rpc),
    Notification(Notification),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub name: String,
    pub argument: Option<ArgumentDecl>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentDecl {
    pub name: String,
    /// `yin-element true` renders the argument as a child element in YIN;
    /// false or absent renders it as an attribute.
    pub yin_element: Option<bool>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Typedef {
    pub name: String,
    pub type_spec: TypeSpec,
    pub units: Option<String>,
    pub default: Option<String>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

/// A `type` statement: a (possibly prefixed) type name with either enum
/// specifications or at most one restriction.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSpec {
    pub name: String,
    pub enums: Vec<EnumSpec>,
    pub restriction: Option<Restriction>,
    pub span: SourceSpan,
}

impl TypeSpec {
    pub fn name_parts(&self) -> (Option<&str>, &str) {
        match self.name.split_once(':') {
            Some((p, n)) => (Some(p), n),
            None => (None, &self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumSpec {
    pub name: String,
    pub value: Option<i64>,
    pub span: SourceSpan,
}

/// Value-space constraint carried by a `type` statement.
#[derive(Debug, Clone, PartialEq)]
pub enum Restriction {
    Range(Vec<RangeInterval>),
    Length(Vec<RangeInterval>),
    Pattern(String),
    BitWidth(u32),
    Path(String),
}

/// One `lo .. hi` interval (or single value, lo == hi) of a range or
/// length argument. `min`/`max` expand to the base type bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeInterval {
    pub lo: Bound,
    pub hi: Bound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Min,
    Max,
    Int(i128),
    Dec(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub name: String,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub typedefs: Vec<Typedef>,
    pub groupings: Vec<Grouping>,
    pub datadefs: Vec<DataDef>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

/// Any data-node-producing statement.
#[derive(Debug, Clone, PartialEq)]
pub enum DataDef {
    Container(Container),
    Leaf(Leaf),
    LeafList(LeafList),
    List(ListNode),
    Choice(Choice),
    AnyXml(AnyXml),
    Uses(Uses),
    Augment(Augment),
}

impl DataDef {
    /// Node name; `uses` reports the referenced grouping, `augment` the
    /// target path text.
    pub fn name(&self) -> &str {
        match self {
            DataDef::Container(c) => &c.name,
            DataDef::Leaf(l) => &l.name,
            DataDef::LeafList(l) => &l.name,
            DataDef::List(l) => &l.name,
            DataDef::Choice(c) => &c.name,
            DataDef::AnyXml(a) => &a.name,
            DataDef::Uses(u) => &u.grouping_ref,
            DataDef::Augment(a) => &a.target_text,
        }
    }

    pub fn span(&self) -> &SourceSpan {
        match self {
            DataDef::Container(c) => &c.span,
            DataDef::Leaf(l) => &l.span,
            DataDef::LeafList(l) => &l.span,
            DataDef::List(l) => &l.span,
            DataDef::Choice(c) => &c.span,
            DataDef::AnyXml(a) => &a.span,
            DataDef::Uses(u) => &u.span,
            DataDef::Augment(a) => &a.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Must {
    pub condition: String,
    pub error_message: Option<String>,
    pub error_app_tag: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub name: String,
    pub musts: Vec<Must>,
    pub typedefs: Vec<Typedef>,
    pub groupings: Vec<Grouping>,
    pub datadefs: Vec<DataDef>,
    pub presence: Option<bool>,
    pub config: Option<bool>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub name: String,
    pub type_spec: TypeSpec,
    pub musts: Vec<Must>,
    pub units: Option<String>,
    pub default: Option<String>,
    pub config: Option<bool>,
    pub mandatory: Option<bool>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafList {
    pub name: String,
    pub type_spec: TypeSpec,
    pub musts: Vec<Must>,
    pub units: Option<String>,
    pub default: Option<String>,
    pub config: Option<bool>,
    pub min_elements: Option<u64>,
    pub max_elements: Option<u64>,
    pub mandatory: Option<bool>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

/// A `unique` statement argument: whitespace-separated descendant paths.
#[derive(Debug, Clone, PartialEq)]
pub struct UniqueSpec {
    pub components: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListNode {
    pub name: String,
    pub key: Option<String>,
    pub key_span: Option<SourceSpan>,
    pub uniques: Vec<UniqueSpec>,
    pub musts: Vec<Must>,
    pub typedefs: Vec<Typedef>,
    pub groupings: Vec<Grouping>,
    pub datadefs: Vec<DataDef>,
    pub min_elements: Option<u64>,
    pub max_elements: Option<u64>,
    pub ordered_by: Option<String>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub name: String,
    pub arms: Vec<CaseArm>,
    pub default: Option<String>,
    pub mandatory: Option<bool>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

/// A full `case` statement or a short case (a bare data node directly
/// under the choice).
#[derive(Debug, Clone, PartialEq)]
pub enum CaseArm {
    Case(Case),
    Short(DataDef),
}

impl CaseArm {
    pub fn name(&self) -> &str {
        match self {
            CaseArm::Case(c) => &c.name,
            CaseArm::Short(d) => d.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub name: String,
    pub datadefs: Vec<DataDef>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnyXml {
    pub name: String,
    pub config: Option<bool>,
    pub mandatory: Option<bool>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Uses {
    pub grouping_ref: String,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub refinements: Vec<Refinement>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

impl Uses {
    pub fn grouping_parts(&self) -> (Option<&str>, &str) {
        match self.grouping_ref.split_once(':') {
            Some((p, n)) => (Some(p), n),
            None => (None, &self.grouping_ref),
        }
    }
}

/// Adjustment applied to a node copied in by `uses`, matched by name and
/// kind against the copied nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Refinement {
    Container(RefineContainer),
    Leaf(RefineLeaf),
    LeafList(RefineLeafList),
    List(RefineList),
    Choice(RefineChoice),
    AnyXml(RefineAnyXml),
}

impl Refinement {
    pub fn name(&self) -> &str {
        match self {
            Refinement::Container(r) => &r.name,
            Refinement::Leaf(r) => &r.name,
            Refinement::LeafList(r) => &r.name,
            Refinement::List(r) => &r.name,
            Refinement::Choice(r) => &r.name,
            Refinement::AnyXml(r) => &r.name,
        }
    }

    pub fn span(&self) -> &SourceSpan {
        match self {
            Refinement::Container(r) => &r.span,
            Refinement::Leaf(r) => &r.span,
            Refinement::LeafList(r) => &r.span,
            Refinement::List(r) => &r.span,
            Refinement::Choice(r) => &r.span,
            Refinement::AnyXml(r) => &r.span,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Refinement::Container(_) => "container",
            Refinement::Leaf(_) => "leaf",
            Refinement::LeafList(_) => "leaf-list",
            Refinement::List(_) => "list",
            Refinement::Choice(_) => "choice",
            Refinement::AnyXml(_) => "anyxml",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineContainer {
    pub name: String,
    pub musts: Vec<Must>,
    pub refinements: Vec<Refinement>,
    pub presence: Option<bool>,
    pub config: Option<bool>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineLeaf {
    pub name: String,
    pub musts: Vec<Must>,
    pub default: Option<String>,
    pub config: Option<bool>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineLeafList {
    pub name: String,
    pub musts: Vec<Must>,
    pub config: Option<bool>,
    pub min_elements: Option<u64>,
    pub max_elements: Option<u64>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineList {
    pub name: String,
    pub musts: Vec<Must>,
    pub refinements: Vec<Refinement>,
    pub config: Option<bool>,
    pub min_elements: Option<u64>,
    pub max_elements: Option<u64>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineChoice {
    pub name: String,
    pub cases: Vec<RefineCase>,
    pub default: Option<String>,
    pub mandatory: Option<bool>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineCase {
    pub name: String,
    pub refinements: Vec<Refinement>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineAnyXml {
    pub name: String,
    pub config: Option<bool>,
    pub mandatory: Option<bool>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
}

/// Statement grafting nodes onto an existing schema node.
#[derive(Debug, Clone, PartialEq)]
pub struct Augment {
    pub target: SchemaNodeId,
    pub target_text: String,
    pub datadefs: Vec<DataDef>,
    pub cases: Vec<Case>,
    pub input: Option<NodeBlock>,
    pub output: Option<NodeBlock>,
    pub when: Option<String>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

/// The payload shape shared by `input` and `output`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeBlock {
    pub typedefs: Vec<Typedef>,
    pub groupings: Vec<Grouping>,
    pub datadefs: Vec<DataDef>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rpc {
    pub name: String,
    pub input: Option<NodeBlock>,
    pub output: Option<NodeBlock>,
    pub typedefs: Vec<Typedef>,
    pub groupings: Vec<Grouping>,
    pub datadefs: Vec<DataDef>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Notification {
    pub name: String,
    pub typedefs: Vec<Typedef>,
    pub groupings: Vec<Grouping>,
    pub datadefs: Vec<DataDef>,
    pub status: Option<String>,
    pub description: Option<String>,
    pub reference: Option<String>,
    pub span: SourceSpan,
    pub ext_uses: Vec<ExtensionUse>,
}

/// A use of an extension statement. The keyword is always prefixed; the
/// substatements are kept verbatim and never interpreted.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionUse {
    pub prefix: String,
    pub name: String,
    pub argument: Option<String>,
    pub children: Vec<RawStatement>,
    pub span: SourceSpan,
}

/// A slash-separated path addressing a node in the schema tree.
///
/// A leading `/` makes the path absolute; steps may carry a module prefix,
/// and `..` steps move to the parent (useful in keyref paths).
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaNodeId {
    pub absolute: bool,
    pub steps: Vec<PathStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub prefix: Option<String>,
    pub name: String,
}

impl PathStep {
    pub fn is_up(&self) -> bool {
        self.prefix.is_none() && self.name == ".."
    }
}

impl SchemaNodeId {
    pub fn parse(text: &str) -> Result<SchemaNodeId, String> {
        let trimmed = text.trim();
        let (absolute, body) = match trimmed.strip_prefix('/') {
            Some(rest) => (true, rest),
            None => (false, trimmed),
        };
        if body.is_empty() {
            return Err("schema node path needs at least one step".to_string());
        }
        let mut steps = Vec::new();
        for raw in body.split('/') {
            if raw.is_empty() {
                return Err("empty step in schema node path".to_string());
            }
            if raw == ".." {
                steps.push(PathStep { prefix: None, name: raw.to_string() });
                continue;
            }
            let (prefix, name) = match raw.split_once(':') {
                Some((p, n)) => (Some(p), n),
                None => (None, raw),
            };
            if name.is_empty() || prefix.is_some_and(str::is_empty) {
                return Err(format!("malformed step `{}` in schema node path", raw));
            }
            steps.push(PathStep {
                prefix: prefix.map(str::to_string),
                name: name.to_string(),
            });
        }
        Ok(SchemaNodeId { absolute, steps })
    }
}

impl std::fmt::Display for SchemaNodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.absolute {
            write!(f, "/")?;
        }
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, "/")?;
            }
            if let Some(p) = &step.prefix {
                write!(f, "{}:", p)?;
            }
            write!(f, "{}", step.name)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_node_id_parse_forms() {
        let p = SchemaNodeId::parse("login/user").unwrap();
        assert!(!p.absolute);
        assert_eq!(p.steps.len(), 2);
        assert_eq!(p.steps[1].name, "user");

        let p = SchemaNodeId::parse("/router:login/user").unwrap();
        assert!(p.absolute);
        assert_eq!(p.steps[0].prefix.as_deref(), Some("router"));

        let p = SchemaNodeId::parse("../interfaces/index").unwrap();
        assert!(p.steps[0].is_up());

        assert!(SchemaNodeId::parse("").is_err());
        assert!(SchemaNodeId::parse("a//b").is_err());
        assert!(SchemaNodeId::parse(":x").is_err());
    }

    #[test]
    fn schema_node_id_display_round_trips() {
        for text in ["login/user", "/router:login/user", "../a/b"] {
            let p = SchemaNodeId::parse(text).unwrap();
            assert_eq!(p.to_string(), text);
        }
    }
}
