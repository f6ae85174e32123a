//! Core library of `yangc`: lexing, parsing, statement-tree checking,
//! import/include resolution, semantic analysis and YIN emission for YANG
//! modules and submodules.
//!
//! The full pipeline for one file is [`validate_file`]; the stages are
//! also usable on their own:
//!
//! ```
//! use yangc_core::{lex, syntax, build, resolver, semantics};
//!
//! let src = "module m { namespace \"urn:m\"; prefix m; revision 2008-01-01; }";
//! let tokens = lex::tokenize(src, "m.yang").unwrap();
//! let raw = syntax::parse(&tokens, "m.yang").unwrap();
//! let (spec, diags) = build::build(&raw);
//! assert!(!diags.has_errors());
//! let (registry, _) = resolver::resolve_linkages(&spec, &[]);
//! let (tree, diags) = semantics::check(&spec, &registry);
//! assert!(!diags.has_errors());
//! assert!(tree.roots("m").is_empty());
//! ```

pub mod ast;
pub mod build;
pub mod diag;
pub mod lex;
pub mod resolver;
pub mod semantics;
pub mod span;
pub mod syntax;
pub mod types;
pub mod yin;

pub use diag::{DiagCode, Diagnostic, Diagnostics, RenderFormat, Severity};
pub use span::SourceSpan;

use ast::Specification;
use resolver::ModuleRegistry;
use semantics::SchemaTree;
use std::path::{Path, PathBuf};
use syntax::RawStatement;

/// Everything one input file produced. A lexical or syntax error aborts
/// the file (no statement tree, one diagnostic); later stages accumulate
/// diagnostics and keep going.
#[derive(Debug, Clone)]
pub struct FileOutcome {
    pub raw: Option<RawStatement>,
    pub spec: Option<Specification>,
    pub registry: Option<ModuleRegistry>,
    pub tree: Option<SchemaTree>,
    pub diagnostics: Vec<Diagnostic>,
}

impl FileOutcome {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    fn failed(diag: Diagnostic) -> FileOutcome {
        FileOutcome {
            raw: None,
            spec: None,
            registry: None,
            tree: None,
            diagnostics: vec![diag],
        }
    }
}

/// Validate one file end to end: tokenize, parse, build, resolve
/// imports/includes along `search_paths`, semantically check.
pub fn validate_file(path: &Path, search_paths: &[PathBuf]) -> FileOutcome {
    let display = path.display().to_string();
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            return FileOutcome::failed(Diagnostic::new(
                DiagCode::FileNotReadable,
                SourceSpan::point(&display, 1, 1),
                format!("cannot read `{}`: {}", display, e),
            ));
        }
    };
    validate_source(&source, &display, search_paths)
}

/// Like [`validate_file`] for in-memory text; `file` is the identifier
/// used in spans.
pub fn validate_source(source: &str, file: &str, search_paths: &[PathBuf]) -> FileOutcome {
    let tokens = match lex::tokenize(source, file) {
        Ok(t) => t,
        Err(d) => return FileOutcome::failed(d),
    };
    let raw = match syntax::parse(&tokens, file) {
        Ok(r) => r,
        Err(d) => return FileOutcome::failed(d),
    };
    let (spec, mut diagnostics) = build::build(&raw);
    let (registry, link_diags) = resolver::resolve_linkages(&spec, search_paths);
    diagnostics.extend(link_diags);
    let (tree, check_diags) = semantics::check(&spec, &registry);
    diagnostics.extend(check_diags);
    FileOutcome {
        raw: Some(raw),
        spec: Some(spec),
        registry: Some(registry),
        tree: Some(tree),
        diagnostics: diagnostics.into_vec(),
    }
}
