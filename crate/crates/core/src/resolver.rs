//! Locating, loading and linking imported modules and included submodules.
//!
//! Specifications live in files named `<name>.yang` found on an ordered
//! search path. `resolve_linkages` loads the transitive closure of a root
//! specification into a frozen [`ModuleRegistry`].

use crate::ast::{SpecKind, Specification};
use crate::build;
use crate::diag::{DiagCode, Diagnostic, Diagnostics};
use crate::lex;
use crate::span::SourceSpan;
use crate::syntax;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ffi::OsStr;
use std::path::{Path, PathBuf};

/// All loaded specifications plus per-specification prefix bindings and the
/// include graph. Frozen after `resolve_linkages` returns; safe to share.
#[derive(Debug, Clone, Default)]
pub struct ModuleRegistry {
    specs: BTreeMap<String, Specification>,
    prefix_tables: BTreeMap<String, BTreeMap<String, String>>,
    include_graph: BTreeMap<String, BTreeSet<String>>,
}

impl ModuleRegistry {
    pub fn get(&self, name: &str) -> Option<&Specification> {
        self.specs.get(name)
    }

    pub fn specs(&self) -> impl Iterator<Item = &Specification> {
        self.specs.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.specs.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// prefix -> module name bindings of one specification.
    pub fn prefix_table(&self, spec: &str) -> Option<&BTreeMap<String, String>> {
        self.prefix_tables.get(spec)
    }

    /// Resolve a prefix as seen from `spec`.
    pub fn resolve_prefix(&self, spec: &str, prefix: &str) -> Option<&str> {
        self.prefix_tables
            .get(spec)?
            .get(prefix)
            .map(String::as_str)
    }

    /// Direct includes of a specification.
    pub fn includes_of(&self, spec: &str) -> impl Iterator<Item = &str> {
        self.include_graph
            .get(spec)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// The submodules a specification (transitively) includes, in
    /// breadth-first include order, deduplicated.
    pub fn include_closure(&self, spec: &str) -> Vec<&str> {
        let mut seen: HashSet<&str> = HashSet::new();
        let mut queue: Vec<&str> = self.includes_of(spec).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < queue.len() {
            let name = queue[i];
            i += 1;
            if seen.insert(name) {
                out.push(name);
                queue.extend(self.includes_of(name));
            }
        }
        out
    }
}

/// Failure to find `<name>.yang` on the search path.
#[derive(Debug, Clone, PartialEq)]
pub struct LocateError {
    pub name: String,
    pub searched: Vec<PathBuf>,
}

impl LocateError {
    pub fn to_diagnostic(&self, span: SourceSpan) -> Diagnostic {
        let dirs: Vec<String> = self
            .searched
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        Diagnostic::new(
            DiagCode::SpecificationNotFound,
            span,
            format!(
                "specification `{}` not found (searched: {})",
                self.name,
                if dirs.is_empty() { "<no paths>".to_string() } else { dirs.join(", ") }
            ),
        )
    }
}

/// Return the first `<name>.yang` found in search-path order.
pub fn locate(name: &str, search_paths: &[PathBuf]) -> Result<PathBuf, LocateError> {
    let file_name = format!("{}.yang", name);
    for dir in search_paths {
        let candidate = dir.join(&file_name);
        if candidate.is_file() {
            return Ok(candidate);
        }
    }
    Err(LocateError {
        name: name.to_string(),
        searched: search_paths.to_vec(),
    })
}

/// Compose the effective search path: explicit paths first, then the
/// entries of a `YANG_PATH`-style value, then the current directory.
pub fn compose_search_paths(explicit: &[PathBuf], yang_path: Option<&OsStr>) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = explicit.to_vec();
    if let Some(value) = yang_path {
        out.extend(std::env::split_paths(value));
    }
    out.push(PathBuf::from("."));
    out
}

/// The search path for this process: `explicit`, then `$YANG_PATH`, then `.`.
pub fn default_search_paths(explicit: &[PathBuf]) -> Vec<PathBuf> {
    compose_search_paths(explicit, std::env::var_os("YANG_PATH").as_deref())
}

/// Load, lex, parse and build one specification file.
///
/// Lexical, syntactic and read failures are fatal for the file (`Err`);
/// statement-tree diagnostics are non-fatal and returned with the spec.
pub fn load_spec_file(path: &Path) -> Result<(Specification, Diagnostics), Diagnostic> {
    let display = path.display().to_string();
    let source = std::fs::read_to_string(path).map_err(|e| {
        Diagnostic::new(
            DiagCode::FileNotReadable,
            SourceSpan::point(&display, 1, 1),
            format!("cannot read `{}`: {}", display, e),
        )
    })?;
    let tokens = lex::tokenize(&source, &display)?;
    let raw = syntax::parse(&tokens, &display)?;
    Ok(build::build(&raw))
}

/// Transitively load every import and include of `root`, verifying linkage
/// rules, and build the closed registry. Never aborts: failures become
/// diagnostics and the affected edges stay unresolved.
pub fn resolve_linkages(
    root: &Specification,
    search_paths: &[PathBuf],
) -> (ModuleRegistry, Diagnostics) {
    let mut r = Resolver {
        registry: ModuleRegistry::default(),
        diags: Diagnostics::new(),
        search_paths,
        in_progress: Vec::new(),
        visited: HashSet::new(),
        failed: HashSet::new(),
    };
    r.registry.specs.insert(root.name.clone(), root.clone());
    r.visit(&root.name.clone());
    (r.registry, r.diags)
}

struct Resolver<'p> {
    registry: ModuleRegistry,
    diags: Diagnostics,
    search_paths: &'p [PathBuf],
    /// Names on the current linkage DFS path, for cycle detection.
    in_progress: Vec<String>,
    visited: HashSet<String>,
    failed: HashSet<String>,
}

impl Resolver<'_> {
    fn visit(&mut self, name: &str) {
        if !self.visited.insert(name.to_string()) {
            return;
        }
        self.in_progress.push(name.to_string());

        let spec = self.registry.specs.get(name).expect("visited spec loaded");
        let own_module = spec.owning_module().to_string();
        let kind = spec.kind;
        let mut table: BTreeMap<String, String> = BTreeMap::new();
        if kind == SpecKind::Module {
            if let Some(p) = spec.own_prefix() {
                table.insert(p.to_string(), name.to_string());
            }
        }
        let imports: Vec<_> = spec.imports().cloned().collect();
        let includes: Vec<_> = spec.includes().cloned().collect();

        for imp in &imports {
            if let Some(bound) = table.get(&imp.prefix) {
                self.diags.push(
                    Diagnostic::new(
                        DiagCode::DuplicatePrefix,
                        imp.span.clone(),
                        format!(
                            "prefix `{}` is already bound to `{}`; each prefix must be unique",
                            imp.prefix, bound
                        ),
                    ),
                );
            } else {
                table.insert(imp.prefix.clone(), imp.module_name.clone());
            }
        }
        self.registry.prefix_tables.insert(name.to_string(), table);

        for imp in &imports {
            if let Some(target) = self.ensure_loaded(&imp.module_name, &imp.span) {
                if self.registry.specs[&target].kind == SpecKind::Submodule {
                    self.diags.push(Diagnostic::new(
                        DiagCode::ImportOfSubmodule,
                        imp.span.clone(),
                        format!("`{}` is a submodule; only modules can be imported", target),
                    ));
                } else {
                    self.visit(&target);
                }
            }
        }
        for inc in &includes {
            let Some(target) = self.ensure_loaded(&inc.submodule_name, &inc.span) else {
                continue;
            };
            let target_spec = &self.registry.specs[&target];
            if target_spec.kind == SpecKind::Module {
                self.diags.push(Diagnostic::new(
                    DiagCode::IncludeOfModule,
                    inc.span.clone(),
                    format!("`{}` is a module; only submodules can be included", target),
                ));
                continue;
            }
            match target_spec.belongs_to() {
                Some(owner) if owner == own_module => {}
                Some(owner) => {
                    self.diags.push(Diagnostic::new(
                        DiagCode::BelongsToMismatch,
                        inc.span.clone(),
                        format!(
                            "included submodule `{}` belongs to `{}`, not to `{}`",
                            target, owner, own_module
                        ),
                    ));
                    continue;
                }
                None => continue, // missing belongs-to already diagnosed at build
            }
            self.registry
                .include_graph
                .entry(name.to_string())
                .or_default()
                .insert(target.clone());
            self.visit(&target);
        }

        self.in_progress.pop();
    }

    /// Make sure `name` is in the registry, loading it if needed. Returns
    /// the registered name, or None when loading failed or a cycle was hit.
    fn ensure_loaded(&mut self, name: &str, span: &SourceSpan) -> Option<String> {
        if self.in_progress.iter().any(|n| n == name) {
            self.diags.push(Diagnostic::new(
                DiagCode::CircularImport,
                span.clone(),
                format!(
                    "circular linkage: {} -> {}",
                    self.in_progress.join(" -> "),
                    name
                ),
            ));
            return None;
        }
        if self.registry.specs.contains_key(name) {
            return Some(name.to_string());
        }
        if self.failed.contains(name) {
            return None;
        }

        let path = match locate(name, self.search_paths) {
            Ok(p) => p,
            Err(e) => {
                self.failed.insert(name.to_string());
                self.diags.push(e.to_diagnostic(span.clone()));
                return None;
            }
        };
        let display = path.display().to_string();
        let source = match std::fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) => {
                self.failed.insert(name.to_string());
                self.diags.report(
                    DiagCode::FileNotReadable,
                    span.clone(),
                    format!("cannot read `{}`: {}", display, e),
                );
                return None;
            }
        };
        let built = lex::tokenize(&source, &display)
            .and_then(|tokens| syntax::parse(&tokens, &display));
        let raw = match built {
            Ok(raw) => raw,
            Err(d) => {
                self.failed.insert(name.to_string());
                self.diags.push(d);
                return None;
            }
        };
        let (spec, diags) = build::build(&raw);
        self.diags.extend(diags);
        if spec.name != name {
            self.failed.insert(name.to_string());
            self.diags.report(
                DiagCode::SpecificationNotFound,
                span.clone(),
                format!(
                    "`{}` declares `{}`, but `{}` was requested",
                    display, spec.name, name
                ),
            );
            return None;
        }
        self.registry.specs.insert(spec.name.clone(), spec);
        Some(name.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use tempfile::TempDir;

    fn write(dir: &Path, name: &str, content: &str) {
        fs::write(dir.join(name), content).unwrap();
    }

    fn build_src(src: &str) -> Specification {
        let toks = lex::tokenize(src, "root.yang").unwrap();
        let raw = syntax::parse(&toks, "root.yang").unwrap();
        build::build(&raw).0
    }

    const YANG_TYPES: &str = "module yang-types {
        namespace \"urn:test:yang-types\"; prefix yang; revision 2008-01-01;
        typedef counter32 { type uint32; } }";

    const ROUTING_POLICIES: &str = "submodule routing-policies {
        belongs-to router; revision 2008-01-01;
        typedef route-preference { type uint16; } }";

    #[test]
    fn locate_picks_first_match_in_path_order() {
        let d1 = TempDir::new().unwrap();
        let d2 = TempDir::new().unwrap();
        write(d1.path(), "router.yang", "module router { }");
        write(d2.path(), "router.yang", "module router { }");

        // oracle: scanning the directories in order, d1 holds the first hit
        let dirs = [d1.path().to_path_buf(), d2.path().to_path_buf()];
        let expected = dirs
            .iter()
            .map(|d| d.join("router.yang"))
            .find(|p| p.is_file())
            .unwrap();

        let found = locate("router", &dirs).unwrap();
        assert_eq!(found, expected);
        assert!(found.starts_with(d1.path()));

        let reversed = [d2.path().to_path_buf(), d1.path().to_path_buf()];
        assert!(locate("router", &reversed).unwrap().starts_with(d2.path()));
    }

    #[test]
    fn locate_single_match_and_missing() {
        let d = TempDir::new().unwrap();
        write(d.path(), "yang-types.yang", YANG_TYPES);
        let p = locate("yang-types", &[d.path().to_path_buf()]).unwrap();
        assert!(p.ends_with("yang-types.yang"));

        let err = locate("missing", &[]).unwrap_err();
        assert_eq!(err.name, "missing");
        assert!(err.searched.is_empty());
    }

    #[test]
    fn router_registry_with_import_and_include() {
        let d = TempDir::new().unwrap();
        write(d.path(), "yang-types.yang", YANG_TYPES);
        write(d.path(), "routing-policies.yang", ROUTING_POLICIES);
        let root = build_src(
            "module router {
               namespace \"urn:madynes:xml:ns:yang:router\"; prefix router;
               import yang-types { prefix yang; }
               include routing-policies;
               revision 2008-01-01;
               leaf network { type yang:counter32; } }",
        );
        let (reg, diags) = resolve_linkages(&root, &[d.path().to_path_buf()]);
        assert!(!diags.has_errors(), "{:?}", diags);
        assert_eq!(reg.len(), 3);
        let table = reg.prefix_table("router").unwrap();
        assert_eq!(table.get("router").map(String::as_str), Some("router"));
        assert_eq!(table.get("yang").map(String::as_str), Some("yang-types"));
        assert_eq!(reg.include_closure("router"), vec!["routing-policies"]);
    }

    #[test]
    fn prefixed_references_are_covered_by_the_prefix_table() {
        let d = TempDir::new().unwrap();
        write(d.path(), "yang-types.yang", YANG_TYPES);
        let root = build_src(
            "module m {
               namespace \"urn:m\"; prefix m; revision 2008-01-01;
               import yang-types { prefix yang; }
               leaf a { type yang:counter32; }
               leaf b { type m:own; }
               typedef own { type int8; } }",
        );
        let (reg, diags) = resolve_linkages(&root, &[d.path().to_path_buf()]);
        assert!(!diags.has_errors());
        // registry closure: every prefix used in a type reference resolves
        for leaf_type in ["yang:counter32", "m:own"] {
            let prefix = leaf_type.split(':').next().unwrap();
            assert!(reg.resolve_prefix("m", prefix).is_some(), "prefix {}", prefix);
        }
    }

    #[test]
    fn belongs_to_mismatch_detected() {
        let d = TempDir::new().unwrap();
        write(
            d.path(),
            "stray.yang",
            "submodule stray { belongs-to other; revision 2008-01-01; }",
        );
        let root = build_src(
            "module m { namespace \"urn:m\"; prefix m; revision 2008-01-01;
               include stray; }",
        );
        let (_, diags) = resolve_linkages(&root, &[d.path().to_path_buf()]);
        assert!(diags.has_code(DiagCode::BelongsToMismatch));
    }

    #[test]
    fn duplicate_prefix_detected() {
        let d = TempDir::new().unwrap();
        write(d.path(), "yang-types.yang", YANG_TYPES);
        write(
            d.path(),
            "more-types.yang",
            "module more-types { namespace \"urn:t2\"; prefix mt; revision 2008-01-01; }",
        );
        let root = build_src(
            "module m { namespace \"urn:m\"; prefix m; revision 2008-01-01;
               import yang-types { prefix yang; }
               import more-types { prefix yang; } }",
        );
        let (reg, diags) = resolve_linkages(&root, &[d.path().to_path_buf()]);
        assert!(diags.has_code(DiagCode::DuplicatePrefix));
        // first binding wins
        assert_eq!(reg.resolve_prefix("m", "yang"), Some("yang-types"));
    }

    #[test]
    fn import_of_submodule_and_include_of_module() {
        let d = TempDir::new().unwrap();
        write(d.path(), "routing-policies.yang", ROUTING_POLICIES);
        write(d.path(), "yang-types.yang", YANG_TYPES);
        let root = build_src(
            "module m { namespace \"urn:m\"; prefix m; revision 2008-01-01;
               import routing-policies { prefix rp; }
               include yang-types; }",
        );
        let (_, diags) = resolve_linkages(&root, &[d.path().to_path_buf()]);
        assert!(diags.has_code(DiagCode::ImportOfSubmodule));
        assert!(diags.has_code(DiagCode::IncludeOfModule));
    }

    #[test]
    fn circular_import_detected() {
        let d = TempDir::new().unwrap();
        write(
            d.path(),
            "a.yang",
            "module a { namespace \"urn:a\"; prefix a; revision 2008-01-01;
               import b { prefix b; } }",
        );
        write(
            d.path(),
            "b.yang",
            "module b { namespace \"urn:b\"; prefix b; revision 2008-01-01;
               import a { prefix a; } }",
        );
        let (root, _) = load_spec_file(&d.path().join("a.yang")).unwrap();
        let (_, diags) = resolve_linkages(&root, &[d.path().to_path_buf()]);
        assert!(diags.has_code(DiagCode::CircularImport));
    }

    #[test]
    fn missing_import_reported_once() {
        let root = build_src(
            "module m { namespace \"urn:m\"; prefix m; revision 2008-01-01;
               import ghost { prefix g; } leaf x { type int8; } }",
        );
        let (_, diags) = resolve_linkages(&root, &[]);
        let n = diags
            .iter()
            .filter(|d| d.code == DiagCode::SpecificationNotFound)
            .count();
        assert_eq!(n, 1);
    }

    #[test]
    fn linkage_order_does_not_change_registry_contents() {
        let d = TempDir::new().unwrap();
        write(d.path(), "yang-types.yang", YANG_TYPES);
        write(
            d.path(),
            "more-types.yang",
            "module more-types { namespace \"urn:t2\"; prefix mt; revision 2008-01-01;
               import yang-types { prefix yang; } }",
        );
        let paths = [d.path().to_path_buf()];
        let spec_a = build_src(
            "module m { namespace \"urn:m\"; prefix m; revision 2008-01-01;
               import yang-types { prefix yang; }
               import more-types { prefix mt; } }",
        );
        let spec_b = build_src(
            "module m { namespace \"urn:m\"; prefix m; revision 2008-01-01;
               import more-types { prefix mt; }
               import yang-types { prefix yang; } }",
        );
        let (ra, da) = resolve_linkages(&spec_a, &paths);
        let (rb, db) = resolve_linkages(&spec_b, &paths);
        assert!(!da.has_errors() && !db.has_errors());
        let names_a: Vec<_> = ra.names().collect();
        let names_b: Vec<_> = rb.names().collect();
        assert_eq!(names_a, names_b);
        assert_eq!(ra.prefix_tables, rb.prefix_tables);
    }

    #[test]
    fn search_path_composition_order() {
        let explicit = [PathBuf::from("/x"), PathBuf::from("/y")];
        let joined = std::env::join_paths(["/e1", "/e2"]).unwrap();
        let paths = compose_search_paths(&explicit, Some(joined.as_os_str()));
        assert_eq!(
            paths,
            vec![
                PathBuf::from("/x"),
                PathBuf::from("/y"),
                PathBuf::from("/e1"),
                PathBuf::from("/e2"),
                PathBuf::from("."),
            ]
        );
        let paths = compose_search_paths(&[], None);
        assert_eq!(paths, vec![PathBuf::from(".")]);
    }
}
