//! Generic statement parsing: token stream to an untyped statement tree.
//!
//! Every YANG statement has the shape `keyword [argument] (; | { ... })`,
//! so the parser needs no per-keyword grammar; extension statements with
//! prefixed keywords parse exactly like built-in ones. Keyword-specific
//! rules are enforced later by the `build` pass.

use crate::diag::{DiagCode, Diagnostic};
use crate::lex::{Token, TokenKind};
use crate::span::SourceSpan;

/// One untyped statement: keyword, optional argument, nested statements.
#[derive(Debug, Clone, PartialEq)]
pub struct RawStatement {
    pub keyword: String,
    pub argument: Option<String>,
    pub children: Vec<RawStatement>,
    pub span: SourceSpan,
}

impl RawStatement {
    /// Split a possibly prefixed keyword into `(prefix, name)`.
    pub fn keyword_parts(&self) -> (Option<&str>, &str) {
        match self.keyword.split_once(':') {
            Some((p, n)) => (Some(p), n),
            None => (None, &self.keyword),
        }
    }

    /// Find the first direct child with the given keyword.
    pub fn child(&self, keyword: &str) -> Option<&RawStatement> {
        self.children.iter().find(|c| c.keyword == keyword)
    }

    /// Structural equality: keyword, argument and children, ignoring spans.
    pub fn same_shape(&self, other: &RawStatement) -> bool {
        self.keyword == other.keyword
            && self.argument == other.argument
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.same_shape(b))
    }

    /// Canonical YANG text: every argument double-quoted, two-space indent.
    /// Re-parsing the output yields a tree with the same shape.
    pub fn to_yang(&self) -> String {
        let mut out = String::new();
        self.write_yang(&mut out, 0);
        out
    }

    fn write_yang(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        out.push_str(&pad);
        out.push_str(&self.keyword);
        if let Some(arg) = &self.argument {
            out.push_str(" \"");
            for c in arg.chars() {
                match c {
                    '\\' => out.push_str("\\\\"),
                    '"' => out.push_str("\\\""),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    _ => out.push(c),
                }
            }
            out.push('"');
        }
        if self.children.is_empty() {
            out.push_str(";\n");
        } else {
            out.push_str(" {\n");
            for child in &self.children {
                child.write_yang(out, depth + 1);
            }
            out.push_str(&pad);
            out.push_str("}\n");
        }
    }
}

/// Parse one specification. The stream must contain exactly one top-level
/// statement and its keyword must be `module` or `submodule`; the first
/// syntax error aborts.
pub fn parse(tokens: &[Token], file: &str) -> Result<RawStatement, Diagnostic> {
    let mut parser = Parser { tokens, pos: 0, file };
    if tokens.is_empty() {
        return Err(Diagnostic::new(
            DiagCode::NotAModuleOrSubmodule,
            SourceSpan::point(file, 1, 1),
            "file contains no specification; expected one module or submodule",
        ));
    }
    let stmt = parser.statement()?;
    if let Some(tok) = parser.peek() {
        let (code, msg) = if tok.kind == TokenKind::RightBrace {
            (DiagCode::UnbalancedBraces, "unmatched `}`".to_string())
        } else {
            (
                DiagCode::MultipleTopLevelStatements,
                "a file must contain exactly one module or submodule".to_string(),
            )
        };
        return Err(Diagnostic::new(code, tok.span.clone(), msg));
    }
    if stmt.keyword != "module" && stmt.keyword != "submodule" {
        return Err(Diagnostic::new(
            DiagCode::NotAModuleOrSubmodule,
            stmt.span.clone(),
            format!("top-level statement is `{}`, expected module or submodule", stmt.keyword),
        ));
    }
    Ok(stmt)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    file: &'t str,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_span(&self) -> SourceSpan {
        match self.tokens.last() {
            Some(t) => t.span.clone(),
            None => SourceSpan::point(self.file, 1, 1),
        }
    }

    fn statement(&mut self) -> Result<RawStatement, Diagnostic> {
        let kw = match self.bump() {
            Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::PrefixedIdentifier) => t,
            Some(t) => {
                return Err(Diagnostic::new(
                    DiagCode::UnexpectedToken,
                    t.span.clone(),
                    format!("expected a statement keyword, found `{}`", t.text),
                ));
            }
            None => {
                return Err(Diagnostic::new(
                    DiagCode::UnexpectedToken,
                    self.eof_span(),
                    "expected a statement keyword, found end of input",
                ));
            }
        };

        let mut argument = None;
        if let Some(t) = self.peek() {
            if matches!(
                t.kind,
                TokenKind::Identifier
                    | TokenKind::PrefixedIdentifier
                    | TokenKind::Number
                    | TokenKind::String
            ) {
                argument = Some(t.text.clone());
                self.bump();
                // `type bits (32);` — fold the width marker into the argument
                while let Some(n) = self.peek() {
                    if n.kind == TokenKind::Number && n.text.starts_with('(') {
                        let arg = argument.get_or_insert_with(String::new);
                        arg.push(' ');
                        arg.push_str(&n.text);
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        }

        match self.bump() {
            Some(t) if t.kind == TokenKind::Semicolon => Ok(RawStatement {
                keyword: kw.text.clone(),
                argument,
                children: Vec::new(),
                span: kw.span.cover(&t.span),
            }),
            Some(t) if t.kind == TokenKind::LeftBrace => {
                let open = t;
                let mut children = Vec::new();
                loop {
                    match self.peek() {
                        Some(t) if t.kind == TokenKind::RightBrace => {
                            let close = self.bump().unwrap();
                            return Ok(RawStatement {
                                keyword: kw.text.clone(),
                                argument,
                                children,
                                span: kw.span.cover(&close.span),
                            });
                        }
                        Some(_) => children.push(self.statement()?),
                        None => {
                            return Err(Diagnostic::new(
                                DiagCode::UnbalancedBraces,
                                open.span.clone(),
                                format!("`{{` opened for `{}` is never closed", kw.text),
                            ));
                        }
                    }
                }
            }
            Some(t) => Err(Diagnostic::new(
                DiagCode::UnexpectedToken,
                t.span.clone(),
                format!("expected `;` or `{{` after `{}`, found `{}`", kw.text, t.text),
            )),
            None => Err(Diagnostic::new(
                DiagCode::UnexpectedToken,
                self.eof_span(),
                format!("expected `;` or `{{` after `{}`, found end of input", kw.text),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lex::tokenize;

    fn parse_src(src: &str) -> Result<RawStatement, Diagnostic> {
        parse(&tokenize(src, "t.yang").unwrap(), "t.yang")
    }

    #[test]
    fn module_header_example() {
        let stmt = parse_src(
            "module router { namespace \"urn:madynes:xml:ns:yang:router\"; prefix router; }",
        )
        .unwrap();
        assert_eq!(stmt.keyword, "module");
        assert_eq!(stmt.argument.as_deref(), Some("router"));
        assert_eq!(stmt.children.len(), 2);
        assert_eq!(stmt.children[0].keyword, "namespace");
        assert_eq!(
            stmt.children[0].argument.as_deref(),
            Some("urn:madynes:xml:ns:yang:router")
        );
        assert_eq!(stmt.children[1].keyword, "prefix");
    }

    #[test]
    fn prefixed_keyword_parses_like_builtin() {
        let stmt = parse_src("module m { myext:c-define \"MY_INTERFACES\"; }").unwrap();
        let child = &stmt.children[0];
        assert_eq!(child.keyword, "myext:c-define");
        assert_eq!(child.argument.as_deref(), Some("MY_INTERFACES"));
        assert!(child.children.is_empty());
        assert_eq!(child.keyword_parts(), (Some("myext"), "c-define"));
    }

    #[test]
    fn minimal_block() {
        let stmt = parse_src("module m { }").unwrap();
        assert_eq!(stmt.keyword, "module");
        assert_eq!(stmt.argument.as_deref(), Some("m"));
        assert!(stmt.children.is_empty());
    }

    #[test]
    fn semicolon_statements_have_no_children() {
        let stmt = parse_src("module m { prefix p; import x { prefix q; } }").unwrap();
        assert!(stmt.children[0].children.is_empty());
        assert_eq!(stmt.children[1].children.len(), 1);
    }

    #[test]
    fn width_marker_folds_into_argument() {
        let stmt = parse_src("module m { leaf l { type bits (32); } }").unwrap();
        let ty = &stmt.children[0].children[0];
        assert_eq!(ty.keyword, "type");
        assert_eq!(ty.argument.as_deref(), Some("bits (32)"));
    }

    #[test]
    fn multiple_top_level_statements_rejected() {
        let err = parse_src("module a { } module b { }").unwrap_err();
        assert_eq!(err.code, DiagCode::MultipleTopLevelStatements);
    }

    #[test]
    fn non_module_top_level_rejected() {
        let err = parse_src("container c { }").unwrap_err();
        assert_eq!(err.code, DiagCode::NotAModuleOrSubmodule);
        let err = parse_src("").unwrap_err();
        assert_eq!(err.code, DiagCode::NotAModuleOrSubmodule);
    }

    #[test]
    fn unbalanced_braces_rejected() {
        let err = parse_src("module m { container c {").unwrap_err();
        assert_eq!(err.code, DiagCode::UnbalancedBraces);
        let err = parse_src("module m { } }").unwrap_err();
        assert_eq!(err.code, DiagCode::UnbalancedBraces);
    }

    #[test]
    fn unexpected_token_rejected() {
        let err = parse_src("module m { ; }").unwrap_err();
        assert_eq!(err.code, DiagCode::UnexpectedToken);
        let err = parse_src("module m { leaf l").unwrap_err();
        assert_eq!(err.code, DiagCode::UnexpectedToken);
    }

    #[test]
    fn canonical_text_round_trips() {
        let src = "module m { description \"multi\\nline \\\"quoted\\\"\"; container c { leaf l { type string; } } }";
        let tree = parse_src(src).unwrap();
        let reparsed = parse_src(&tree.to_yang()).unwrap();
        assert!(tree.same_shape(&reparsed));
    }
}
