//! Whole-specification checking.
//!
//! `check` runs, in order: scope construction, typedef/restriction/default
//! checks, uses expansion, augment application, key/unique/keyref path
//! resolution and extension-use resolution. Semantic errors skip the
//! enclosing block and checking continues; the pass never aborts.
//!
//! The result is a [`SchemaTree`]: the resolved data-node hierarchy per
//! module, with `uses` nodes replaced by their expansion and augment
//! payloads attached under their targets.

use crate::ast::*;
use crate::diag::{DiagCode, Diagnostic, Diagnostics};
use crate::resolver::ModuleRegistry;
use crate::span::SourceSpan;
use crate::types::{
    self, resolve_parent_space, resolve_type, validate_default, BaseType, ResolvedType,
    TypedefLookup, TypedefScope,
};
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Container,
    Leaf,
    LeafList,
    List,
    Choice,
    Case,
    AnyXml,
    Rpc,
    Notification,
    Input,
    Output,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Container => "container",
            NodeKind::Leaf => "leaf",
            NodeKind::LeafList => "leaf-list",
            NodeKind::List => "list",
            NodeKind::Choice => "choice",
            NodeKind::Case => "case",
            NodeKind::AnyXml => "anyxml",
            NodeKind::Rpc => "rpc",
            NodeKind::Notification => "notification",
            NodeKind::Input => "input",
            NodeKind::Output => "output",
        }
    }

    /// Kinds that can carry child data nodes.
    pub fn has_children(self) -> bool {
        !matches!(self, NodeKind::Leaf | NodeKind::LeafList | NodeKind::AnyXml)
    }
}

/// One resolved schema node.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaNode {
    pub name: String,
    pub kind: NodeKind,
    /// Module whose namespace the node lives in.
    pub module: String,
    pub config: bool,
    pub children: Vec<SchemaNode>,
    /// Resolved type for leaf and leaf-list nodes.
    pub type_info: Option<ResolvedType>,
    pub default: Option<String>,
    pub mandatory: Option<bool>,
    /// `key` argument of a list, with its span.
    pub keys: Option<(String, SourceSpan)>,
    pub uniques: Vec<(String, SourceSpan)>,
    pub span: SourceSpan,
}

impl SchemaNode {
    fn new(name: &str, kind: NodeKind, module: &str, config: bool, span: &SourceSpan) -> Self {
        SchemaNode {
            name: name.to_string(),
            kind,
            module: module.to_string(),
            config,
            children: Vec::new(),
            type_info: None,
            default: None,
            mandatory: None,
            keys: None,
            uniques: Vec::new(),
            span: span.clone(),
        }
    }

    pub fn child(&self, name: &str) -> Option<&SchemaNode> {
        self.children.iter().find(|c| c.name == name)
    }

    /// Structural equality: names, kinds and resolved base types, over the
    /// whole subtree. Spans and constraints are ignored.
    pub fn same_structure(&self, other: &SchemaNode) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.type_info.as_ref().map(|t| t.base)
                == other.type_info.as_ref().map(|t| t.base)
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.same_structure(b))
    }
}

/// Resolved data-node hierarchy, one root list per module (or standalone
/// submodule). Immutable once `check` returns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SchemaTree {
    roots: BTreeMap<String, Vec<SchemaNode>>,
}

/// Address of a node in the tree: module plus child indices from the root.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePath {
    pub module: String,
    pub indices: Vec<usize>,
}

impl SchemaTree {
    pub fn modules(&self) -> impl Iterator<Item = &str> {
        self.roots.keys().map(String::as_str)
    }

    pub fn roots(&self, module: &str) -> &[SchemaNode] {
        self.roots.get(module).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn node(&self, path: &NodePath) -> Option<&SchemaNode> {
        let mut idx = path.indices.iter();
        let first = *idx.next()?;
        let mut node = self.roots.get(&path.module)?.get(first)?;
        for &i in idx {
            node = node.children.get(i)?;
        }
        Some(node)
    }

    fn node_mut(&mut self, path: &NodePath) -> Option<&mut SchemaNode> {
        let mut idx = path.indices.iter();
        let first = *idx.next()?;
        let mut node = self.roots.get_mut(&path.module)?.get_mut(first)?;
        for &i in idx {
            node = node.children.get_mut(i)?;
        }
        Some(node)
    }

    fn children_at<'t>(&'t self, module: &str, indices: &[usize]) -> Option<&'t [SchemaNode]> {
        if indices.is_empty() {
            return Some(self.roots(module));
        }
        self.node(&NodePath {
            module: module.to_string(),
            indices: indices.to_vec(),
        })
        .map(|n| n.children.as_slice())
    }

    /// Walk direct children by name, starting at a module's roots.
    pub fn find(&self, module: &str, names: &[&str]) -> Option<&SchemaNode> {
        let mut level = self.roots(module);
        let mut found = None;
        for name in names {
            let node = level.iter().find(|n| n.name == *name)?;
            level = &node.children;
            found = Some(node);
        }
        found
    }
}

/// Failure to resolve a schema node path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathError {
    pub step_index: usize,
    pub step: String,
    pub candidates: Vec<String>,
}

impl PathError {
    pub fn to_diagnostic(&self, path: &SchemaNodeId, span: &SourceSpan) -> Diagnostic {
        Diagnostic::new(DiagCode::PathStepNotFound, span.clone(), self.message(path))
    }

    pub fn message(&self, path: &SchemaNodeId) -> String {
        let cands = if self.candidates.is_empty() {
            "nothing".to_string()
        } else {
            self.candidates.join(", ")
        };
        format!(
            "step {} (`{}`) of `{}` does not resolve; visible here: {}",
            self.step_index + 1,
            self.step,
            path,
            cands
        )
    }
}

/// Resolve a schema node path. Absolute paths start at the tree root of
/// the path's first-step module; relative paths start at `context` (or the
/// roots of `from_spec`'s module when no context is given). Choice and
/// case layers are transparent unless a step names them explicitly.
pub fn resolve_schema_node<'t>(
    tree: &'t SchemaTree,
    registry: &ModuleRegistry,
    from_spec: &str,
    context: Option<&NodePath>,
    path: &SchemaNodeId,
) -> Result<&'t SchemaNode, PathError> {
    let module = registry
        .get(from_spec)
        .map(|s| s.owning_module().to_string())
        .unwrap_or_else(|| from_spec.to_string());
    let resolver = |p: &str| registry.resolve_prefix(from_spec, p).map(str::to_string);
    let node_path = resolve_steps(tree, &module, context, path, &resolver)?;
    Ok(tree.node(&node_path).expect("resolved path is valid"))
}

fn resolve_steps(
    tree: &SchemaTree,
    current_module: &str,
    context: Option<&NodePath>,
    path: &SchemaNodeId,
    resolve_prefix: &dyn Fn(&str) -> Option<String>,
) -> Result<NodePath, PathError> {
    let err = |i: usize, step: &PathStep, cands: Vec<String>| PathError {
        step_index: i,
        step: match &step.prefix {
            Some(p) => format!("{}:{}", p, step.name),
            None => step.name.clone(),
        },
        candidates: cands,
    };

    // pick the starting point
    let mut cur: NodePath = match context {
        Some(ctx) if !path.absolute => ctx.clone(),
        _ => {
            let module = match path.steps.first().and_then(|s| s.prefix.as_deref()) {
                Some(p) => resolve_prefix(p).ok_or_else(|| {
                    err(0, &path.steps[0], vec![format!("unknown prefix `{}`", p)])
                })?,
                None => current_module.to_string(),
            };
            NodePath {
                module,
                indices: Vec::new(),
            }
        }
    };

    for (i, step) in path.steps.iter().enumerate() {
        if step.is_up() {
            if cur.indices.pop().is_none() {
                return Err(err(i, step, vec!["already at the top level".to_string()]));
            }
            continue;
        }
        let want_module = match &step.prefix {
            Some(p) => Some(
                resolve_prefix(p)
                    .ok_or_else(|| err(i, step, vec![format!("unknown prefix `{}`", p)]))?,
            ),
            None => None,
        };
        let children = tree
            .children_at(&cur.module, &cur.indices)
            .ok_or_else(|| err(i, step, vec![]))?;
        match transparent_find(children, &step.name, want_module.as_deref()) {
            Some(mut rel) => cur.indices.append(&mut rel),
            None => {
                return Err(err(i, step, visible_names(children)));
            }
        }
    }
    if cur.indices.is_empty() {
        // a path of only `..` steps does not name a node
        return Err(PathError {
            step_index: path.steps.len().saturating_sub(1),
            step: "..".to_string(),
            candidates: vec![],
        });
    }
    Ok(cur)
}

/// Find `name` among `children`: directly, or through transparent
/// choice/case layers. Prefixed steps additionally require the owning
/// module to match.
fn transparent_find(
    children: &[SchemaNode],
    name: &str,
    want_module: Option<&str>,
) -> Option<Vec<usize>> {
    let module_ok = |n: &SchemaNode| want_module.is_none_or(|m| n.module == m);
    for (i, ch) in children.iter().enumerate() {
        if ch.name == name && module_ok(ch) {
            return Some(vec![i]);
        }
    }
    for (i, ch) in children.iter().enumerate() {
        if matches!(ch.kind, NodeKind::Choice | NodeKind::Case) {
            if let Some(mut sub) = transparent_find(&ch.children, name, want_module) {
                let mut v = vec![i];
                v.append(&mut sub);
                return Some(v);
            }
        }
    }
    None
}

fn visible_names(children: &[SchemaNode]) -> Vec<String> {
    let mut out = Vec::new();
    for ch in children {
        out.push(ch.name.clone());
        if matches!(ch.kind, NodeKind::Choice | NodeKind::Case) {
            out.extend(visible_names(&ch.children));
        }
    }
    out
}

/// Validate a list's `key` argument against its direct children: every
/// component must name a distinct direct leaf child.
pub fn check_list_keys(list: &SchemaNode) -> Diagnostics {
    let mut diags = Diagnostics::new();
    let Some((key_text, span)) = &list.keys else {
        return diags;
    };
    let mut seen: HashSet<&str> = HashSet::new();
    for name in key_text.split_whitespace() {
        if !seen.insert(name) {
            diags.report(
                DiagCode::DuplicateKeyComponent,
                span.clone(),
                format!("key component `{}` is listed twice", name),
            );
            continue;
        }
        match list.child(name) {
            Some(child) if child.kind == NodeKind::Leaf => {}
            Some(child) => diags.report(
                DiagCode::KeyLeafNotFound,
                span.clone(),
                format!(
                    "key component `{}` is a {}, it must be a leaf",
                    name,
                    child.kind.as_str()
                ),
            ),
            None => diags.report(
                DiagCode::KeyLeafNotFound,
                span.clone(),
                format!("key component `{}` is not a direct leaf of `{}`", name, list.name),
            ),
        }
    }
    diags
}

/// Validate the `unique` arguments of a list: each component is a
/// descendant path resolving to a leaf beneath the list.
pub fn check_unique(list: &SchemaNode) -> Diagnostics {
    let mut diags = Diagnostics::new();
    for (components, span) in &list.uniques {
        let mut seen: HashSet<&str> = HashSet::new();
        for component in components.split_whitespace() {
            if !seen.insert(component) {
                diags.report(
                    DiagCode::DuplicateUniqueComponent,
                    span.clone(),
                    format!("unique component `{}` is listed twice", component),
                );
                continue;
            }
            let Ok(id) = SchemaNodeId::parse(component) else {
                diags.report(
                    DiagCode::UniqueComponentNotFound,
                    span.clone(),
                    format!("`{}` is not a valid descendant path", component),
                );
                continue;
            };
            if id.absolute || id.steps.iter().any(|s| s.is_up()) {
                diags.report(
                    DiagCode::UniqueComponentNotFound,
                    span.clone(),
                    format!("unique component `{}` must be a descendant path", component),
                );
                continue;
            }
            match find_descendant(list, &id.steps) {
                Some(node) if node.kind == NodeKind::Leaf => {}
                Some(node) => diags.report(
                    DiagCode::UniqueComponentNotALeaf,
                    span.clone(),
                    format!(
                        "unique component `{}` names a {}, it must be a leaf",
                        component,
                        node.kind.as_str()
                    ),
                ),
                None => diags.report(
                    DiagCode::UniqueComponentNotFound,
                    span.clone(),
                    format!("unique component `{}` not found beneath `{}`", component, list.name),
                ),
            }
        }
    }
    diags
}

fn find_descendant<'t>(node: &'t SchemaNode, steps: &[PathStep]) -> Option<&'t SchemaNode> {
    let mut cur = node;
    for step in steps {
        let rel = transparent_find(&cur.children, &step.name, None)?;
        for i in rel {
            cur = &cur.children[i];
        }
    }
    Some(cur)
}

/// Run the whole-specification check against a closed registry.
pub fn check(spec: &Specification, registry: &ModuleRegistry) -> (SchemaTree, Diagnostics) {
    let mut checker = Checker::new(spec, registry);
    checker.run();
    (checker.tree, checker.diags)
}

// ---------------------------------------------------------------------
// scope frames

/// One lexical frame: definitions visible at a nesting level. Frames own
/// clones of their definitions so expansion copies can build on them.
#[derive(Default)]
struct Frame {
    parent: Option<usize>,
    /// Specification whose prefix table governs references in this frame.
    origin_spec: String,
    typedefs: HashMap<String, (Typedef, String)>,
    groupings: HashMap<String, (Grouping, String)>,
}

struct Scopes {
    frames: Vec<Frame>,
    /// Merged top-level definitions of each module family.
    family_base: BTreeMap<String, usize>,
    /// Per-(family, spec) view frames selecting the right prefix table.
    family_view: BTreeMap<(String, String), usize>,
}

impl Scopes {
    fn new() -> Self {
        Scopes {
            frames: Vec::new(),
            family_base: BTreeMap::new(),
            family_view: BTreeMap::new(),
        }
    }

    fn push(&mut self, parent: Option<usize>, origin_spec: &str) -> usize {
        self.frames.push(Frame {
            parent,
            origin_spec: origin_spec.to_string(),
            ..Frame::default()
        });
        self.frames.len() - 1
    }

    fn add_defs(
        &mut self,
        frame: usize,
        origin_spec: &str,
        typedefs: &[Typedef],
        groupings: &[Grouping],
    ) {
        for td in typedefs {
            self.frames[frame]
                .typedefs
                .entry(td.name.clone())
                .or_insert_with(|| (td.clone(), origin_spec.to_string()));
        }
        for g in groupings {
            self.frames[frame]
                .groupings
                .entry(g.name.clone())
                .or_insert_with(|| (g.clone(), origin_spec.to_string()));
        }
    }

    fn view(&self, module: &str, spec: &str) -> usize {
        self.family_view
            .get(&(module.to_string(), spec.to_string()))
            .copied()
            .or_else(|| self.family_base.get(module).copied())
            .unwrap_or(0)
    }
}

/// Scope lookup view handed to the type system.
struct ScopeView<'c> {
    scopes: &'c Scopes,
    prefix_tables: &'c BTreeMap<String, BTreeMap<String, String>>,
}

impl ScopeView<'_> {
    fn resolve_prefix(&self, spec: &str, prefix: &str) -> Option<&str> {
        self.prefix_tables.get(spec)?.get(prefix).map(String::as_str)
    }
}

impl TypedefScope for ScopeView<'_> {
    fn lookup_typedef(
        &self,
        at: usize,
        prefix: Option<&str>,
        name: &str,
    ) -> TypedefLookup<'_> {
        match prefix {
            Some(p) => {
                let origin = &self.scopes.frames[at].origin_spec;
                let Some(module) = self.resolve_prefix(origin, p) else {
                    return TypedefLookup::UnknownPrefix;
                };
                let Some(&base) = self.scopes.family_base.get(module) else {
                    return TypedefLookup::NotFound;
                };
                match self.scopes.frames[base].typedefs.get(name) {
                    Some((td, origin_spec)) => {
                        TypedefLookup::Found(td, self.scopes.view(module, origin_spec))
                    }
                    None => TypedefLookup::NotFound,
                }
            }
            None => {
                let mut cur = Some(at);
                while let Some(i) = cur {
                    if let Some((td, origin)) = self.scopes.frames[i].typedefs.get(name) {
                        // a hit in a family base frame resolves onward with
                        // the declaring spec's own prefix table
                        let decl = if self.scopes.frames[i].parent.is_none() {
                            self.scopes.view(&self.scopes.frames[i].origin_spec, origin)
                        } else {
                            i
                        };
                        return TypedefLookup::Found(td, decl);
                    }
                    cur = self.scopes.frames[i].parent;
                }
                TypedefLookup::NotFound
            }
        }
    }
}

// ---------------------------------------------------------------------
// the checker

struct AugEntry {
    augment: Augment,
    /// Lexical scope for expanding and typing the payload.
    scope: usize,
    /// Family whose tree hosts relative targets.
    module: String,
    /// Specification the augment appears in (for target step prefixes).
    origin_spec: String,
    /// Name chain of the enclosing node for nested augments.
    context: Option<Vec<String>>,
}

struct Checker<'a> {
    diags: Diagnostics,
    tree: SchemaTree,
    scopes: Scopes,
    /// module -> family members, module (or standalone submodule) first.
    families: Vec<(String, Vec<&'a Specification>)>,
    prefix_tables: BTreeMap<String, BTreeMap<String, String>>,
    /// module -> extension declarations (name -> declares-an-argument).
    extensions: BTreeMap<String, HashMap<String, bool>>,
    augments: Vec<AugEntry>,
    expansion_stack: Vec<SourceSpan>,
}

impl<'a> Checker<'a> {
    fn new(root: &'a Specification, registry: &'a ModuleRegistry) -> Self {
        let mut specs: Vec<&'a Specification> = registry.specs().collect();
        if registry.get(&root.name).is_none() {
            specs.push(root);
        }

        // prefix tables, with a fallback for a root that was never resolved
        let mut prefix_tables = BTreeMap::new();
        for spec in &specs {
            let table = registry
                .prefix_table(&spec.name)
                .cloned()
                .unwrap_or_else(|| fallback_prefix_table(spec));
            prefix_tables.insert(spec.name.clone(), table);
        }

        // group specifications into module families
        let by_name: BTreeMap<&str, &'a Specification> =
            specs.iter().map(|s| (s.name.as_str(), *s)).collect();
        let mut claimed: HashSet<&str> = HashSet::new();
        for spec in &specs {
            for inc in registry.include_closure(&spec.name) {
                claimed.insert(inc);
            }
        }
        let mut families: Vec<(String, Vec<&'a Specification>)> = Vec::new();
        for (name, spec) in &by_name {
            let standalone_submodule =
                spec.kind == SpecKind::Submodule && !claimed.contains(name);
            if spec.kind == SpecKind::Module || standalone_submodule {
                let mut members = vec![*spec];
                for inc in registry.include_closure(name) {
                    if let Some(s) = by_name.get(inc) {
                        members.push(*s);
                    }
                }
                families.push((name.to_string(), members));
            }
        }

        // dependency order: imported families first
        let family_names: Vec<String> = families.iter().map(|(n, _)| n.clone()).collect();
        let mut order: Vec<String> = Vec::new();
        let mut done: HashSet<String> = HashSet::new();
        for name in &family_names {
            topo_visit(name, &families, &mut done, &mut order, 0);
        }
        families.sort_by_key(|(n, _)| order.iter().position(|o| o == n).unwrap_or(usize::MAX));

        // merged extension declarations per family
        let mut extensions: BTreeMap<String, HashMap<String, bool>> = BTreeMap::new();
        for (module, members) in &families {
            let map = extensions.entry(module.clone()).or_default();
            for spec in members {
                for ext in spec.extensions() {
                    map.entry(ext.name.clone())
                        .or_insert(ext.argument.is_some());
                }
            }
        }

        let mut checker = Checker {
            diags: Diagnostics::new(),
            tree: SchemaTree::default(),
            scopes: Scopes::new(),
            families,
            prefix_tables,
            extensions,
            augments: Vec::new(),
            expansion_stack: Vec::new(),
        };
        checker.build_family_scopes();
        checker
    }

    fn build_family_scopes(&mut self) {
        for (module, members) in &self.families {
            let base = self.scopes.push(None, module);
            self.scopes.family_base.insert(module.clone(), base);
            for spec in members {
                let tds: Vec<Typedef> = spec.typedefs().cloned().collect();
                let gs: Vec<Grouping> = spec.groupings().cloned().collect();
                self.scopes.add_defs(base, &spec.name, &tds, &gs);
                let view = self.scopes.push(Some(base), &spec.name);
                self.scopes
                    .family_view
                    .insert((module.clone(), spec.name.clone()), view);
            }
        }
    }

    fn view(&self) -> ScopeView<'_> {
        ScopeView {
            scopes: &self.scopes,
            prefix_tables: &self.prefix_tables,
        }
    }

    fn run(&mut self) {
        // typedef, restriction and default checks at every declaration site
        let families = self.families.clone();
        for (module, members) in &families {
            for spec in members {
                let scope = self.scopes.view(module, &spec.name);
                self.decl_bodies(&spec.bodies, scope);
            }
        }

        // schema trees with uses expansion
        for (module, members) in &families {
            let mut roots: Vec<SchemaNode> = Vec::new();
            for spec in members {
                let scope = self.scopes.view(module, &spec.name);
                for body in &spec.bodies {
                    let nodes = match body {
                        Body::Data(d) => {
                            self.build_datadef(d, scope, module, true, &[])
                        }
                        Body::Rpc(r) => self.build_rpc(r, scope, module),
                        Body::Notification(n) => self.build_notification(n, scope, module),
                        _ => Vec::new(),
                    };
                    for node in nodes {
                        push_child(&mut roots, node, &mut self.diags);
                    }
                }
            }
            self.tree.roots.insert(module.clone(), roots);
        }

        self.apply_augments();
        self.constraint_pass();
        self.extension_pass(&families);
    }

    fn report(&mut self, code: DiagCode, span: &SourceSpan, msg: String) {
        self.diags.push(Diagnostic::new(code, span.clone(), msg));
    }

    // -- typedef declaration checks --------------------------------------

    fn decl_bodies(&mut self, bodies: &[Body], scope: usize) {
        for body in bodies {
            match body {
                Body::Typedef(td) => self.decl_typedef(td, scope),
                Body::Grouping(g) => self.decl_grouping(g, scope),
                Body::Data(d) => self.decl_datadef(d, scope),
                Body::Rpc(r) => {
                    let inner = self.frame_for(scope, &r.typedefs, &r.groupings);
                    for td in &r.typedefs {
                        self.decl_typedef(td, inner);
                    }
                    for g in &r.groupings {
                        self.decl_grouping(g, inner);
                    }
                    for d in &r.datadefs {
                        self.decl_datadef(d, inner);
                    }
                    for block in [&r.input, &r.output].into_iter().flatten() {
                        self.decl_block(block, inner);
                    }
                }
                Body::Notification(n) => {
                    let inner = self.frame_for(scope, &n.typedefs, &n.groupings);
                    for td in &n.typedefs {
                        self.decl_typedef(td, inner);
                    }
                    for g in &n.groupings {
                        self.decl_grouping(g, inner);
                    }
                    for d in &n.datadefs {
                        self.decl_datadef(d, inner);
                    }
                }
                Body::Extension(_) => {}
            }
        }
    }

    /// Child frame carrying nested typedef/grouping declarations.
    fn frame_for(&mut self, parent: usize, typedefs: &[Typedef], groupings: &[Grouping]) -> usize {
        if typedefs.is_empty() && groupings.is_empty() {
            return parent;
        }
        let origin = self.scopes.frames[parent].origin_spec.clone();
        let frame = self.scopes.push(Some(parent), &origin);
        self.scopes.add_defs(frame, &origin, typedefs, groupings);
        frame
    }

    fn decl_block(&mut self, block: &NodeBlock, scope: usize) {
        let inner = self.frame_for(scope, &block.typedefs, &block.groupings);
        for td in &block.typedefs {
            self.decl_typedef(td, inner);
        }
        for g in &block.groupings {
            self.decl_grouping(g, inner);
        }
        for d in &block.datadefs {
            self.decl_datadef(d, inner);
        }
    }

    fn decl_grouping(&mut self, g: &Grouping, scope: usize) {
        let inner = self.frame_for(scope, &g.typedefs, &g.groupings);
        for td in &g.typedefs {
            self.decl_typedef(td, inner);
        }
        for nested in &g.groupings {
            self.decl_grouping(nested, inner);
        }
        for d in &g.datadefs {
            self.decl_datadef(d, inner);
        }
    }

    fn decl_datadef(&mut self, d: &DataDef, scope: usize) {
        match d {
            DataDef::Container(c) => {
                let inner = self.frame_for(scope, &c.typedefs, &c.groupings);
                for td in &c.typedefs {
                    self.decl_typedef(td, inner);
                }
                for g in &c.groupings {
                    self.decl_grouping(g, inner);
                }
                for child in &c.datadefs {
                    self.decl_datadef(child, inner);
                }
            }
            DataDef::List(l) => {
                let inner = self.frame_for(scope, &l.typedefs, &l.groupings);
                for td in &l.typedefs {
                    self.decl_typedef(td, inner);
                }
                for g in &l.groupings {
                    self.decl_grouping(g, inner);
                }
                for child in &l.datadefs {
                    self.decl_datadef(child, inner);
                }
            }
            DataDef::Leaf(l) => {
                self.check_type_usage(&l.type_spec, l.default.as_deref(), &l.span, scope);
            }
            DataDef::LeafList(l) => {
                self.check_type_usage(&l.type_spec, l.default.as_deref(), &l.span, scope);
            }
            DataDef::Choice(c) => {
                for arm in &c.arms {
                    match arm {
                        CaseArm::Case(case) => {
                            for child in &case.datadefs {
                                self.decl_datadef(child, scope);
                            }
                        }
                        CaseArm::Short(node) => self.decl_datadef(node, scope),
                    }
                }
            }
            DataDef::AnyXml(_) | DataDef::Uses(_) => {}
            DataDef::Augment(a) => {
                for child in &a.datadefs {
                    self.decl_datadef(child, scope);
                }
                for case in &a.cases {
                    for child in &case.datadefs {
                        self.decl_datadef(child, scope);
                    }
                }
                for block in [&a.input, &a.output].into_iter().flatten() {
                    self.decl_block(block, scope);
                }
            }
        }
    }

    fn decl_typedef(&mut self, td: &Typedef, scope: usize) {
        self.check_type_usage(&td.type_spec, td.default.as_deref(), &td.span, scope);
    }

    /// The per-declaration type checks: the referenced chain resolves, the
    /// declared restriction narrows, patterns compile, defaults fit.
    fn check_type_usage(
        &mut self,
        ts: &TypeSpec,
        default: Option<&str>,
        at: &SourceSpan,
        scope: usize,
    ) {
        if let Some(Restriction::Pattern(p)) = &ts.restriction {
            if regex::Regex::new(&format!("^(?:{})$", p)).is_err() {
                self.report(
                    DiagCode::InvalidArgument,
                    &ts.span,
                    format!("`{}` is not a valid pattern", p),
                );
            }
        }
        let view = self.view();
        let parent = match resolve_parent_space(ts, scope, &view) {
            Ok(p) => p,
            Err(e) => {
                self.diags.push(Diagnostic::new(e.code, e.span, e.message));
                return;
            }
        };
        if let Some(r) = &ts.restriction {
            if let Err(v) = types::check_restriction_subset(r, &parent.space) {
                self.report(v.code, &ts.span, v.message);
            }
        }
        if let Some(text) = default {
            let view = self.view();
            if let Ok(full) = resolve_type(ts, scope, &view) {
                if let Err(v) = validate_default(text, &full) {
                    self.report(v.code, at, v.message);
                }
            }
        }
    }

    // -- schema tree construction ----------------------------------------

    fn build_datadef(
        &mut self,
        d: &DataDef,
        scope: usize,
        module: &str,
        parent_config: bool,
        path: &[String],
    ) -> Vec<SchemaNode> {
        match d {
            DataDef::Container(c) => {
                let config = parent_config && c.config.unwrap_or(true);
                let mut node =
                    SchemaNode::new(&c.name, NodeKind::Container, module, config, &c.span);
                let inner = self.frame_for(scope, &c.typedefs, &c.groupings);
                let child_path = extend_path(path, &c.name);
                self.build_children(&c.datadefs, inner, module, config, &child_path, &mut node);
                vec![node]
            }
            DataDef::Leaf(l) => {
                let view = self.view();
                let Ok(rt) = resolve_type(&l.type_spec, scope, &view) else {
                    return Vec::new(); // diagnosed at the declaration site
                };
                let config = parent_config && l.config.unwrap_or(true);
                let mut node = SchemaNode::new(&l.name, NodeKind::Leaf, module, config, &l.span);
                node.default = l
                    .default
                    .clone()
                    .or_else(|| rt.default.as_ref().map(|d| d.value.clone()));
                node.mandatory = l.mandatory;
                node.type_info = Some(rt);
                vec![node]
            }
            DataDef::LeafList(l) => {
                let view = self.view();
                let Ok(rt) = resolve_type(&l.type_spec, scope, &view) else {
                    return Vec::new();
                };
                let config = parent_config && l.config.unwrap_or(true);
                let mut node =
                    SchemaNode::new(&l.name, NodeKind::LeafList, module, config, &l.span);
                node.default = l.default.clone();
                node.mandatory = l.mandatory;
                node.type_info = Some(rt);
                vec![node]
            }
            DataDef::List(l) => {
                let config = parent_config && true;
                let mut node = SchemaNode::new(&l.name, NodeKind::List, module, config, &l.span);
                node.keys = l
                    .key
                    .as_ref()
                    .map(|k| (k.clone(), l.key_span.clone().unwrap_or(l.span.clone())));
                node.uniques = l
                    .uniques
                    .iter()
                    .map(|u| (u.components.clone(), u.span.clone()))
                    .collect();
                let inner = self.frame_for(scope, &l.typedefs, &l.groupings);
                let child_path = extend_path(path, &l.name);
                self.build_children(&l.datadefs, inner, module, config, &child_path, &mut node);
                vec![node]
            }
            DataDef::Choice(c) => {
                let config = parent_config;
                let mut node = SchemaNode::new(&c.name, NodeKind::Choice, module, config, &c.span);
                let child_path = extend_path(path, &c.name);
                for arm in &c.arms {
                    let case_node = match arm {
                        CaseArm::Case(case) => {
                            let mut case_node = SchemaNode::new(
                                &case.name,
                                NodeKind::Case,
                                module,
                                config,
                                &case.span,
                            );
                            let case_path = extend_path(&child_path, &case.name);
                            self.build_children(
                                &case.datadefs,
                                scope,
                                module,
                                config,
                                &case_path,
                                &mut case_node,
                            );
                            case_node
                        }
                        CaseArm::Short(dd) => {
                            // a short case wraps its single node in an
                            // implicit case of the same name
                            let mut case_node = SchemaNode::new(
                                dd.name(),
                                NodeKind::Case,
                                module,
                                config,
                                dd.span(),
                            );
                            let case_path = extend_path(&child_path, dd.name());
                            for built in
                                self.build_datadef(dd, scope, module, config, &case_path)
                            {
                                push_child(&mut case_node.children, built, &mut self.diags);
                            }
                            case_node
                        }
                    };
                    push_child(&mut node.children, case_node, &mut self.diags);
                }
                if let Some(default) = &c.default {
                    if !node.children.iter().any(|arm| &arm.name == default) {
                        self.report(
                            DiagCode::ChoiceDefaultUnknown,
                            &c.span,
                            format!(
                                "choice `{}` default `{}` does not name a declared case",
                                c.name, default
                            ),
                        );
                    }
                }
                node.default = c.default.clone();
                node.mandatory = c.mandatory;
                vec![node]
            }
            DataDef::AnyXml(a) => {
                let config = parent_config && a.config.unwrap_or(true);
                let mut node = SchemaNode::new(&a.name, NodeKind::AnyXml, module, config, &a.span);
                node.mandatory = a.mandatory;
                vec![node]
            }
            DataDef::Uses(u) => self.expand_uses(u, scope, module, parent_config, path),
            DataDef::Augment(a) => {
                self.augments.push(AugEntry {
                    augment: a.clone(),
                    scope,
                    module: module.to_string(),
                    origin_spec: self.scopes.frames[scope].origin_spec.clone(),
                    context: if path.is_empty() {
                        None
                    } else {
                        Some(path.to_vec())
                    },
                });
                Vec::new()
            }
        }
    }

    fn build_children(
        &mut self,
        defs: &[DataDef],
        scope: usize,
        module: &str,
        config: bool,
        path: &[String],
        parent: &mut SchemaNode,
    ) {
        for d in defs {
            for node in self.build_datadef(d, scope, module, config, path) {
                push_child(&mut parent.children, node, &mut self.diags);
            }
        }
    }

    fn build_rpc(&mut self, r: &Rpc, scope: usize, module: &str) -> Vec<SchemaNode> {
        let mut node = SchemaNode::new(&r.name, NodeKind::Rpc, module, false, &r.span);
        let inner = self.frame_for(scope, &r.typedefs, &r.groupings);
        let path = vec![r.name.clone()];
        for (block, kind, name) in [
            (&r.input, NodeKind::Input, "input"),
            (&r.output, NodeKind::Output, "output"),
        ] {
            if let Some(b) = block {
                let mut io = SchemaNode::new(name, kind, module, false, &b.span);
                let io_scope = self.frame_for(inner, &b.typedefs, &b.groupings);
                let io_path = extend_path(&path, name);
                self.build_children(&b.datadefs, io_scope, module, false, &io_path, &mut io);
                push_child(&mut node.children, io, &mut self.diags);
            }
        }
        self.build_children(&r.datadefs, inner, module, false, &path, &mut node);
        vec![node]
    }

    fn build_notification(&mut self, n: &Notification, scope: usize, module: &str) -> Vec<SchemaNode> {
        let mut node = SchemaNode::new(&n.name, NodeKind::Notification, module, false, &n.span);
        let inner = self.frame_for(scope, &n.typedefs, &n.groupings);
        let path = vec![n.name.clone()];
        self.build_children(&n.datadefs, inner, module, false, &path, &mut node);
        vec![node]
    }

    // -- uses expansion ----------------------------------------------------

    fn lookup_grouping(&self, scope: usize, prefix: Option<&str>, name: &str)
        -> Result<(Grouping, usize, String), DiagCode>
    {
        match prefix {
            Some(p) => {
                let origin = &self.scopes.frames[scope].origin_spec;
                let Some(module) = self
                    .prefix_tables
                    .get(origin)
                    .and_then(|t| t.get(p))
                else {
                    return Err(DiagCode::UnknownPrefix);
                };
                let Some(&base) = self.scopes.family_base.get(module) else {
                    return Err(DiagCode::UnknownGrouping);
                };
                match self.scopes.frames[base].groupings.get(name) {
                    Some((g, origin_spec)) => Ok((
                        g.clone(),
                        self.scopes.view(module, origin_spec),
                        origin_spec.clone(),
                    )),
                    None => Err(DiagCode::UnknownGrouping),
                }
            }
            None => {
                let mut cur = Some(scope);
                while let Some(i) = cur {
                    if let Some((g, origin_spec)) = self.scopes.frames[i].groupings.get(name) {
                        let decl = if self.scopes.frames[i].parent.is_none() {
                            self.scopes.view(&self.scopes.frames[i].origin_spec, origin_spec)
                        } else {
                            i
                        };
                        return Ok((g.clone(), decl, origin_spec.clone()));
                    }
                    cur = self.scopes.frames[i].parent;
                }
                Err(DiagCode::UnknownGrouping)
            }
        }
    }

    /// Splice a deep copy of the grouping's datadefs in place of the uses
    /// node, with refinements overlaid on the copies. The result is
    /// equivalent to writing the grouping's contents inline.
    fn expand_uses(
        &mut self,
        u: &Uses,
        scope: usize,
        module: &str,
        parent_config: bool,
        path: &[String],
    ) -> Vec<SchemaNode> {
        let (prefix, name) = u.grouping_parts();
        let (grouping, decl_scope, _origin) = match self.lookup_grouping(scope, prefix, name) {
            Ok(hit) => hit,
            Err(code) => {
                let what = match code {
                    DiagCode::UnknownPrefix => format!("unknown prefix in `{}`", u.grouping_ref),
                    _ => format!("unknown grouping `{}`", u.grouping_ref),
                };
                self.report(code, &u.span, what);
                return Vec::new();
            }
        };
        if self.expansion_stack.contains(&grouping.span) {
            self.report(
                DiagCode::CircularGroupingUse,
                &u.span,
                format!("grouping `{}` directly or transitively uses itself", grouping.name),
            );
            return Vec::new();
        }

        let mut copies = grouping.datadefs.clone();
        for refinement in &u.refinements {
            self.apply_refinement(&mut copies, refinement);
        }

        self.expansion_stack.push(grouping.span.clone());
        let inner = self.frame_for(decl_scope, &grouping.typedefs, &grouping.groupings);
        let mut nodes = Vec::new();
        for d in &copies {
            nodes.extend(self.build_datadef(d, inner, module, parent_config, path));
        }
        self.expansion_stack.pop();
        nodes
    }

    fn apply_refinement(&mut self, copies: &mut [DataDef], r: &Refinement) {
        let Some(target) = copies.iter_mut().find(|d| {
            d.name() == r.name() && !matches!(d, DataDef::Uses(_) | DataDef::Augment(_))
        }) else {
            self.report(
                DiagCode::RefinementTargetNotFound,
                r.span(),
                format!("refinement target `{}` is not present in the grouping", r.name()),
            );
            return;
        };
        let mismatch = |checker: &mut Self, target_kind: &str| {
            checker.report(
                DiagCode::RefinementKindMismatch,
                r.span(),
                format!(
                    "refinement of `{}` is a {}, the copied node is a {}",
                    r.name(),
                    r.kind_name(),
                    target_kind
                ),
            );
        };
        match (r, target) {
            (Refinement::Leaf(rl), DataDef::Leaf(l)) => {
                l.musts.extend(rl.musts.iter().cloned());
                overlay(&mut l.default, &rl.default);
                overlay(&mut l.config, &rl.config);
                overlay(&mut l.description, &rl.description);
                overlay(&mut l.reference, &rl.reference);
            }
            (Refinement::Container(rc), DataDef::Container(c)) => {
                c.musts.extend(rc.musts.iter().cloned());
                overlay(&mut c.presence, &rc.presence);
                overlay(&mut c.config, &rc.config);
                overlay(&mut c.description, &rc.description);
                overlay(&mut c.reference, &rc.reference);
                for nested in &rc.refinements {
                    self.apply_refinement(&mut c.datadefs, nested);
                }
            }
            (Refinement::LeafList(rl), DataDef::LeafList(l)) => {
                l.musts.extend(rl.musts.iter().cloned());
                overlay(&mut l.config, &rl.config);
                overlay(&mut l.min_elements, &rl.min_elements);
                overlay(&mut l.max_elements, &rl.max_elements);
                overlay(&mut l.description, &rl.description);
                overlay(&mut l.reference, &rl.reference);
            }
            (Refinement::List(rl), DataDef::List(l)) => {
                l.musts.extend(rl.musts.iter().cloned());
                // a list statement carries no config of its own
                overlay(&mut l.min_elements, &rl.min_elements);
                overlay(&mut l.max_elements, &rl.max_elements);
                overlay(&mut l.description, &rl.description);
                overlay(&mut l.reference, &rl.reference);
                for nested in &rl.refinements {
                    self.apply_refinement(&mut l.datadefs, nested);
                }
            }
            (Refinement::Choice(rc), DataDef::Choice(c)) => {
                overlay(&mut c.default, &rc.default);
                overlay(&mut c.mandatory, &rc.mandatory);
                overlay(&mut c.description, &rc.description);
                overlay(&mut c.reference, &rc.reference);
                for rcase in &rc.cases {
                    let Some(arm) = c.arms.iter_mut().find(|a| a.name() == rcase.name) else {
                        self.report(
                            DiagCode::RefinementTargetNotFound,
                            &rcase.span,
                            format!("case `{}` is not present in choice `{}`", rcase.name, c.name),
                        );
                        continue;
                    };
                    match arm {
                        CaseArm::Case(case) => {
                            for nested in &rcase.refinements {
                                self.apply_refinement(&mut case.datadefs, nested);
                            }
                        }
                        CaseArm::Short(node) => {
                            for nested in &rcase.refinements {
                                self.apply_refinement(std::slice::from_mut(node), nested);
                            }
                        }
                    }
                }
            }
            (Refinement::AnyXml(ra), DataDef::AnyXml(a)) => {
                overlay(&mut a.config, &ra.config);
                overlay(&mut a.mandatory, &ra.mandatory);
                overlay(&mut a.description, &ra.description);
                overlay(&mut a.reference, &ra.reference);
            }
            (_, target) => {
                let kind = datadef_kind_name(target);
                mismatch(self, kind);
            }
        }
    }

    // -- augment application -----------------------------------------------

    fn apply_augments(&mut self) {
        // payloads can queue further augments through nested uses; cap the
        // rounds so a self-feeding expansion cannot spin forever
        let mut rounds = 0;
        while !self.augments.is_empty() {
            rounds += 1;
            if rounds > 64 {
                let entry = &self.augments[0];
                self.diags.push(Diagnostic::new(
                    DiagCode::CircularGroupingUse,
                    entry.augment.span.clone(),
                    "augment expansion does not terminate".to_string(),
                ));
                self.augments.clear();
                break;
            }
            let batch = std::mem::take(&mut self.augments);
            for entry in batch {
                self.apply_one_augment(entry);
            }
        }
    }

    fn apply_one_augment(&mut self, entry: AugEntry) {
        let aug = &entry.augment;
        let context = match &entry.context {
            None => None,
            Some(names) => {
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                match self.path_of_names(&entry.module, &refs) {
                    Some(p) => Some(p),
                    None => return, // the enclosing node was dropped after an error
                }
            }
        };
        let tables = self.prefix_tables.clone();
        let origin = entry.origin_spec.clone();
        let resolver =
            move |p: &str| tables.get(&origin)?.get(p).map(String::as_str).map(str::to_string);
        let target_path = match resolve_steps(
            &self.tree,
            &entry.module,
            context.as_ref(),
            &aug.target,
            &resolver,
        ) {
            Ok(p) => p,
            Err(e) => {
                let msg = e.message(&aug.target);
                self.report(
                    DiagCode::AugmentTargetNotFound,
                    &aug.span,
                    format!("augment target not found: {}", msg),
                );
                return;
            }
        };
        let target = self.tree.node(&target_path).expect("path resolved");
        let target_kind = target.kind;
        let target_config = target.config;
        let target_module = target_path.module.clone();

        // the allowed payload depends on the augmented node
        let has_cases = !aug.cases.is_empty();
        let has_io = aug.input.is_some() || aug.output.is_some();
        let has_data = !aug.datadefs.is_empty();
        let ok = match target_kind {
            NodeKind::Choice => has_cases && !has_io && !has_data,
            NodeKind::Rpc => has_io && !has_cases && !has_data,
            NodeKind::Container
            | NodeKind::List
            | NodeKind::Case
            | NodeKind::Input
            | NodeKind::Output
            | NodeKind::Notification => has_data && !has_cases && !has_io,
            NodeKind::Leaf | NodeKind::LeafList | NodeKind::AnyXml => false,
        };
        if !ok {
            self.report(
                DiagCode::AugmentPayloadMismatch,
                &aug.span,
                format!(
                    "augment payload does not suit the {} `{}`",
                    target_kind.as_str(),
                    aug.target
                ),
            );
            return;
        }

        // nested augments queued from the payload resolve relative to the
        // graft point, addressed by name
        let target_names = self.names_of_path(&target_path);
        match target_kind {
            NodeKind::Choice => {
                let mut arms = Vec::new();
                for case in &aug.cases {
                    let mut case_node = SchemaNode::new(
                        &case.name,
                        NodeKind::Case,
                        &target_module,
                        target_config,
                        &case.span,
                    );
                    let case_path = extend_path(&target_names, &case.name);
                    self.build_children(
                        &case.datadefs,
                        entry.scope,
                        &target_module,
                        target_config,
                        &case_path,
                        &mut case_node,
                    );
                    arms.push(case_node);
                }
                self.graft(&target_path, arms, &aug.span);
            }
            NodeKind::Rpc => {
                for (block, kind, name) in [
                    (&aug.input, NodeKind::Input, "input"),
                    (&aug.output, NodeKind::Output, "output"),
                ] {
                    let Some(b) = block else { continue };
                    let scope = self.frame_for(entry.scope, &b.typedefs, &b.groupings);
                    let mut fresh =
                        SchemaNode::new(name, kind, &target_module, false, &b.span);
                    let io_path = extend_path(&target_names, name);
                    self.build_children(
                        &b.datadefs,
                        scope,
                        &target_module,
                        false,
                        &io_path,
                        &mut fresh,
                    );
                    let target = self.tree.node_mut(&target_path).expect("path resolved");
                    if let Some(io) = target.children.iter_mut().find(|c| c.kind == kind) {
                        let mut diags = std::mem::take(&mut self.diags);
                        for node in fresh.children {
                            push_child_graft(&mut io.children, node, &mut diags, &b.span);
                        }
                        self.diags = diags;
                    } else {
                        target.children.push(fresh);
                    }
                }
            }
            _ => {
                let mut nodes = Vec::new();
                for d in &aug.datadefs {
                    nodes.extend(self.build_datadef(
                        d,
                        entry.scope,
                        &target_module,
                        target_config,
                        &target_names,
                    ));
                }
                self.graft(&target_path, nodes, &aug.span);
            }
        }
    }

    fn names_of_path(&self, path: &NodePath) -> Vec<String> {
        let mut names = Vec::new();
        let mut level = self.tree.roots(&path.module);
        for &i in &path.indices {
            names.push(level[i].name.clone());
            level = &level[i].children;
        }
        names
    }

    /// Attach nodes under the target, diagnosing name collisions.
    fn graft(&mut self, target_path: &NodePath, nodes: Vec<SchemaNode>, at: &SourceSpan) {
        let mut diags = std::mem::take(&mut self.diags);
        let target = self.tree.node_mut(target_path).expect("path resolved");
        for node in nodes {
            push_child_graft(&mut target.children, node, &mut diags, at);
        }
        self.diags = diags;
    }

    fn path_of_names(&self, module: &str, names: &[&str]) -> Option<NodePath> {
        let mut indices = Vec::new();
        let mut level = self.tree.roots(module);
        for name in names {
            let i = level.iter().position(|n| n.name == *name)?;
            indices.push(i);
            level = &level[i].children;
        }
        Some(NodePath {
            module: module.to_string(),
            indices,
        })
    }

    // -- key / unique / keyref ----------------------------------------------

    fn constraint_pass(&mut self) {
        let modules: Vec<String> = self.tree.modules().map(str::to_string).collect();
        for module in modules {
            let n = self.tree.roots(&module).len();
            for i in 0..n {
                self.constrain_node(NodePath {
                    module: module.clone(),
                    indices: vec![i],
                });
            }
        }
    }

    fn constrain_node(&mut self, path: NodePath) {
        let node = self.tree.node(&path).expect("walk stays in bounds");
        match node.kind {
            NodeKind::List => {
                let key_diags = check_list_keys(node);
                let unique_diags = check_unique(node);
                self.diags.extend(key_diags);
                self.diags.extend(unique_diags);
            }
            NodeKind::Leaf
                if node.type_info.as_ref().map(|t| t.base) == Some(BaseType::Keyref) =>
            {
                let leaf = node.clone();
                self.check_keyref(&leaf, &path);
            }
            _ => {}
        }
        let n = self.tree.node(&path).unwrap().children.len();
        for i in 0..n {
            let mut child = path.clone();
            child.indices.push(i);
            self.constrain_node(child);
        }
    }

    /// A keyref leaf's path must resolve, from the leaf, to a leaf that is
    /// a key component of its parent list.
    fn check_keyref(&mut self, leaf: &SchemaNode, path: &NodePath) {
        let span = leaf.span.clone();
        let module = leaf.module.clone();
        let Some(path_text) = leaf
            .type_info
            .as_ref()
            .and_then(|t| t.space.path.clone())
        else {
            self.report(
                DiagCode::KeyrefTargetInvalid,
                &span,
                format!("keyref leaf `{}` has no path restriction", leaf.name),
            );
            return;
        };
        let id = match SchemaNodeId::parse(&path_text) {
            Ok(id) => id,
            Err(e) => {
                self.report(
                    DiagCode::KeyrefTargetInvalid,
                    &span,
                    format!("bad keyref path `{}`: {}", path_text, e),
                );
                return;
            }
        };
        let tables = self.prefix_tables.clone();
        let spec = module.clone();
        let resolver =
            move |p: &str| tables.get(&spec)?.get(p).map(String::as_str).map(str::to_string);
        let resolved = resolve_steps(&self.tree, &module, Some(path), &id, &resolver);
        let target_path = match resolved {
            Ok(p) => p,
            Err(e) => {
                self.report(
                    DiagCode::KeyrefTargetInvalid,
                    &span,
                    format!("keyref path does not resolve: {}", e.message(&id)),
                );
                return;
            }
        };
        let target = self.tree.node(&target_path).expect("path resolved");
        let target_name = target.name.clone();
        if target.kind != NodeKind::Leaf {
            self.report(
                DiagCode::KeyrefTargetInvalid,
                &span,
                format!("keyref path names a {}, not a leaf", target.kind.as_str()),
            );
            return;
        }
        let mut parent_path = target_path.clone();
        parent_path.indices.pop();
        let parent = if parent_path.indices.is_empty() {
            None
        } else {
            self.tree.node(&parent_path)
        };
        let is_key = parent.is_some_and(|p| {
            p.kind == NodeKind::List
                && p.keys
                    .as_ref()
                    .is_some_and(|(k, _)| k.split_whitespace().any(|c| c == target_name))
        });
        if !is_key {
            self.report(
                DiagCode::KeyrefTargetInvalid,
                &span,
                format!("keyref target `{}` is not a key leaf of a list", target_name),
            );
        }
    }

    // -- extension uses ------------------------------------------------------

    fn extension_pass(&mut self, families: &[(String, Vec<&'a Specification>)]) {
        for (_, members) in families {
            for spec in members {
                let mut uses: Vec<&ExtensionUse> = Vec::new();
                collect_ext_uses_spec(spec, &mut uses);
                for eu in uses {
                    self.check_ext_use(eu, &spec.name);
                }
            }
        }
    }

    fn check_ext_use(&mut self, eu: &ExtensionUse, origin_spec: &str) {
        let Some(module) = self
            .prefix_tables
            .get(origin_spec)
            .and_then(|t| t.get(&eu.prefix))
            .cloned()
        else {
            self.report(
                DiagCode::UnknownPrefix,
                &eu.span,
                format!("unknown prefix `{}` on extension use", eu.prefix),
            );
            return;
        };
        let Some(declares_argument) = self
            .extensions
            .get(&module)
            .and_then(|m| m.get(&eu.name))
            .copied()
        else {
            self.report(
                DiagCode::UnknownExtension,
                &eu.span,
                format!("module `{}` does not define extension `{}`", module, eu.name),
            );
            return;
        };
        match (declares_argument, eu.argument.is_some()) {
            (true, false) => self.report(
                DiagCode::ExtensionArgumentMismatch,
                &eu.span,
                format!("extension `{}:{}` takes an argument", eu.prefix, eu.name),
            ),
            (false, true) => self.report(
                DiagCode::ExtensionArgumentMismatch,
                &eu.span,
                format!("extension `{}:{}` takes no argument", eu.prefix, eu.name),
            ),
            _ => {}
        }
    }
}

fn fallback_prefix_table(spec: &Specification) -> BTreeMap<String, String> {
    let mut table = BTreeMap::new();
    if let Some(p) = spec.own_prefix() {
        table.insert(p.to_string(), spec.name.clone());
    }
    for imp in spec.imports() {
        table
            .entry(imp.prefix.clone())
            .or_insert_with(|| imp.module_name.clone());
    }
    table
}

fn topo_visit(
    name: &str,
    families: &[(String, Vec<&Specification>)],
    done: &mut HashSet<String>,
    order: &mut Vec<String>,
    depth: usize,
) {
    if depth > 64 || done.contains(name) {
        return;
    }
    done.insert(name.to_string());
    if let Some((_, members)) = families.iter().find(|(n, _)| n == name) {
        let mut deps: Vec<String> = Vec::new();
        for spec in members {
            deps.extend(spec.imports().map(|i| i.module_name.clone()));
        }
        for dep in deps {
            topo_visit(&dep, families, done, order, depth + 1);
        }
    }
    order.push(name.to_string());
}

fn extend_path(path: &[String], name: &str) -> Vec<String> {
    let mut p = path.to_vec();
    p.push(name.to_string());
    p
}

fn overlay<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
    if value.is_some() {
        *slot = value.clone();
    }
}

fn datadef_kind_name(d: &DataDef) -> &'static str {
    match d {
        DataDef::Container(_) => "container",
        DataDef::Leaf(_) => "leaf",
        DataDef::LeafList(_) => "leaf-list",
        DataDef::List(_) => "list",
        DataDef::Choice(_) => "choice",
        DataDef::AnyXml(_) => "anyxml",
        DataDef::Uses(_) => "uses",
        DataDef::Augment(_) => "augment",
    }
}

/// Append a child, dropping it with a diagnostic when a sibling of the
/// same name already exists.
fn push_child(children: &mut Vec<SchemaNode>, node: SchemaNode, diags: &mut Diagnostics) {
    if let Some(existing) = children.iter().find(|c| c.name == node.name) {
        diags.push(
            Diagnostic::new(
                DiagCode::DuplicateSiblingName,
                node.span.clone(),
                format!("sibling name `{}` is already taken", node.name),
            )
            .with_related(existing.span.clone()),
        );
        return;
    }
    children.push(node);
}

/// Like `push_child` but collisions are augment errors.
fn push_child_graft(
    children: &mut Vec<SchemaNode>,
    node: SchemaNode,
    diags: &mut Diagnostics,
    at: &SourceSpan,
) {
    if children.iter().any(|c| c.name == node.name) {
        diags.push(Diagnostic::new(
            DiagCode::AugmentNameCollision,
            at.clone(),
            format!("augment adds `{}`, which already exists under the target", node.name),
        ));
        return;
    }
    children.push(node);
}

fn collect_ext_uses_spec<'x>(spec: &'x Specification, out: &mut Vec<&'x ExtensionUse>) {
    out.extend(&spec.ext_uses);
    for body in &spec.bodies {
        match body {
            Body::Typedef(t) => out.extend(&t.ext_uses),
            Body::Grouping(g) => collect_ext_uses_grouping(g, out),
            Body::Data(d) => collect_ext_uses_datadef(d, out),
            Body::Rpc(r) => {
                out.extend(&r.ext_uses);
                for g in &r.groupings {
                    collect_ext_uses_grouping(g, out);
                }
                for t in &r.typedefs {
                    out.extend(&t.ext_uses);
                }
                for d in &r.datadefs {
                    collect_ext_uses_datadef(d, out);
                }
                for block in [&r.input, &r.output].into_iter().flatten() {
                    collect_ext_uses_block(block, out);
                }
            }
            Body::Notification(n) => {
                out.extend(&n.ext_uses);
                for g in &n.groupings {
                    collect_ext_uses_grouping(g, out);
                }
                for t in &n.typedefs {
                    out.extend(&t.ext_uses);
                }
                for d in &n.datadefs {
                    collect_ext_uses_datadef(d, out);
                }
            }
            Body::Extension(_) => {}
        }
    }
}

fn collect_ext_uses_grouping<'x>(g: &'x Grouping, out: &mut Vec<&'x ExtensionUse>) {
    out.extend(&g.ext_uses);
    for t in &g.typedefs {
        out.extend(&t.ext_uses);
    }
    for nested in &g.groupings {
        collect_ext_uses_grouping(nested, out);
    }
    for d in &g.datadefs {
        collect_ext_uses_datadef(d, out);
    }
}

fn collect_ext_uses_block<'x>(b: &'x NodeBlock, out: &mut Vec<&'x ExtensionUse>) {
    for t in &b.typedefs {
        out.extend(&t.ext_uses);
    }
    for g in &b.groupings {
        collect_ext_uses_grouping(g, out);
    }
    for d in &b.datadefs {
        collect_ext_uses_datadef(d, out);
    }
}

fn collect_ext_uses_datadef<'x>(d: &'x DataDef, out: &mut Vec<&'x ExtensionUse>) {
    match d {
        DataDef::Container(c) => {
            out.extend(&c.ext_uses);
            for t in &c.typedefs {
                out.extend(&t.ext_uses);
            }
            for g in &c.groupings {
                collect_ext_uses_grouping(g, out);
            }
            for child in &c.datadefs {
                collect_ext_uses_datadef(child, out);
            }
        }
        DataDef::Leaf(l) => out.extend(&l.ext_uses),
        DataDef::LeafList(l) => out.extend(&l.ext_uses),
        DataDef::List(l) => {
            out.extend(&l.ext_uses);
            for t in &l.typedefs {
                out.extend(&t.ext_uses);
            }
            for g in &l.groupings {
                collect_ext_uses_grouping(g, out);
            }
            for child in &l.datadefs {
                collect_ext_uses_datadef(child, out);
            }
        }
        DataDef::Choice(c) => {
            out.extend(&c.ext_uses);
            for arm in &c.arms {
                match arm {
                    CaseArm::Case(case) => {
                        for child in &case.datadefs {
                            collect_ext_uses_datadef(child, out);
                        }
                    }
                    CaseArm::Short(node) => collect_ext_uses_datadef(node, out),
                }
            }
        }
        DataDef::AnyXml(a) => out.extend(&a.ext_uses),
        DataDef::Uses(u) => out.extend(&u.ext_uses),
        DataDef::Augment(a) => {
            out.extend(&a.ext_uses);
            for child in &a.datadefs {
                collect_ext_uses_datadef(child, out);
            }
            for case in &a.cases {
                for child in &case.datadefs {
                    collect_ext_uses_datadef(child, out);
                }
            }
            for block in [&a.input, &a.output].into_iter().flatten() {
                collect_ext_uses_block(block, out);
            }
        }
    }
}
