//! Statement-tree checking: RawStatement trees to the typed AST.
//!
//! Cardinality rules (`can occur at most once`, mandatory substatements)
//! are enforced here. A violation produces a diagnostic, the offending
//! block is dropped, and building continues — this pass never aborts.
//! Unknown prefixed keywords become [`ExtensionUse`] nodes on their
//! parent; unknown unprefixed keywords are misplaced-substatement errors.

use crate::ast::*;
use crate::diag::{DiagCode, Diagnostics};
use crate::span::SourceSpan;
use crate::syntax::RawStatement;
use crate::types::{parse_range_text, RangeKind};

/// Build the typed specification for a parsed module or submodule.
pub fn build(raw: &RawStatement) -> (Specification, Diagnostics) {
    let mut b = Builder {
        diags: Diagnostics::new(),
    };
    let spec = b.specification(raw);
    (spec, b.diags)
}

struct Builder {
    diags: Diagnostics,
}

const DATADEF_KEYWORDS: &[&str] = &[
    "container", "leaf", "leaf-list", "list", "choice", "anyxml", "any-xml", "uses", "augment",
];

fn is_datadef_keyword(kw: &str) -> bool {
    DATADEF_KEYWORDS.contains(&kw)
}

impl Builder {
    fn report(&mut self, code: DiagCode, span: &SourceSpan, msg: String) {
        self.diags.report(code, span.clone(), msg);
    }

    /// Argument required; its absence is diagnosed.
    fn req_arg(&mut self, stmt: &RawStatement) -> Option<String> {
        match &stmt.argument {
            Some(a) => Some(a.clone()),
            None => {
                self.report(
                    DiagCode::InvalidArgument,
                    &stmt.span,
                    format!("`{}` requires an argument", stmt.keyword),
                );
                None
            }
        }
    }

    /// Argument required and no substatements allowed.
    fn leaf_arg(&mut self, stmt: &RawStatement) -> Option<String> {
        for child in &stmt.children {
            self.report(
                DiagCode::MisplacedSubstatement,
                &child.span,
                format!("`{}` takes no substatements", stmt.keyword),
            );
        }
        self.req_arg(stmt)
    }

    fn bool_arg(&mut self, stmt: &RawStatement) -> Option<bool> {
        match self.leaf_arg(stmt)?.as_str() {
            "true" => Some(true),
            "false" => Some(false),
            other => {
                self.report(
                    DiagCode::InvalidArgument,
                    &stmt.span,
                    format!("`{}` expects \"true\" or \"false\", got `{}`", stmt.keyword, other),
                );
                None
            }
        }
    }

    fn u64_arg(&mut self, stmt: &RawStatement) -> Option<u64> {
        let text = self.leaf_arg(stmt)?;
        match text.parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.report(
                    DiagCode::InvalidArgument,
                    &stmt.span,
                    format!("`{}` expects a non-negative integer, got `{}`", stmt.keyword, text),
                );
                None
            }
        }
    }

    fn i64_arg(&mut self, stmt: &RawStatement) -> Option<i64> {
        let text = self.leaf_arg(stmt)?;
        match text.parse::<i64>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.report(
                    DiagCode::InvalidArgument,
                    &stmt.span,
                    format!("`{}` expects an integer, got `{}`", stmt.keyword, text),
                );
                None
            }
        }
    }

    /// Store a value in an at-most-once slot; later occurrences are
    /// diagnosed and dropped.
    fn once<T>(&mut self, slot: &mut Option<T>, child: &RawStatement, value: Option<T>) {
        if slot.is_some() {
            self.report(
                DiagCode::DuplicateSubstatement,
                &child.span,
                format!("`{}` can occur at most once here; duplicate ignored", child.keyword),
            );
        } else if let Some(v) = value {
            *slot = Some(v);
        }
    }

    fn once_arg(&mut self, slot: &mut Option<String>, child: &RawStatement) {
        let v = self.leaf_arg(child);
        self.once(slot, child, v);
    }

    fn once_bool(&mut self, slot: &mut Option<bool>, child: &RawStatement) {
        let v = self.bool_arg(child);
        self.once(slot, child, v);
    }

    fn once_u64(&mut self, slot: &mut Option<u64>, child: &RawStatement) {
        let v = self.u64_arg(child);
        self.once(slot, child, v);
    }

    /// Fallback for keywords no builder claimed: prefixed keywords attach
    /// to the parent as extension uses, the rest are misplaced.
    fn unknown_child(
        &mut self,
        child: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
        parent: &str,
    ) {
        let (prefix, name) = child.keyword_parts();
        if let Some(prefix) = prefix {
            sink.push(ExtensionUse {
                prefix: prefix.to_string(),
                name: name.to_string(),
                argument: child.argument.clone(),
                children: child.children.clone(),
                span: child.span.clone(),
            });
        } else {
            self.report(
                DiagCode::MisplacedSubstatement,
                &child.span,
                format!("`{}` is not a valid substatement of `{}`", child.keyword, parent),
            );
        }
    }

    fn specification(&mut self, raw: &RawStatement) -> Specification {
        let kind = match raw.keyword.as_str() {
            "module" => SpecKind::Module,
            "submodule" => SpecKind::Submodule,
            other => {
                self.report(
                    DiagCode::NotAModuleOrSubmodule,
                    &raw.span,
                    format!("`{}` is not a module or submodule", other),
                );
                SpecKind::Module
            }
        };
        let name = self.req_arg(raw).unwrap_or_default();

        let mut namespace = None;
        let mut prefix = None;
        let mut belongs_to = None;
        let mut yang_version = None;
        let mut metas = Metas::default();
        let mut linkages = Vec::new();
        let mut revisions = Vec::new();
        let mut bodies = Vec::new();
        let mut ext_uses = Vec::new();

        for child in &raw.children {
            match (kind, child.keyword.as_str()) {
                (SpecKind::Module, "namespace") => self.once_arg(&mut namespace, child),
                (SpecKind::Module, "prefix") => self.once_arg(&mut prefix, child),
                (SpecKind::Submodule, "belongs-to") => self.once_arg(&mut belongs_to, child),
                (_, "yang-version") => self.once_arg(&mut yang_version, child),
                (_, "organization") => self.once_arg(&mut metas.organization, child),
                (_, "contact") => self.once_arg(&mut metas.contact, child),
                (_, "description") => self.once_arg(&mut metas.description, child),
                (_, "reference") => self.once_arg(&mut metas.reference, child),
                (_, "import") => {
                    if let Some(imp) = self.import(child, &mut ext_uses) {
                        linkages.push(Linkage::Import(imp));
                    }
                }
                (_, "include") => {
                    if let Some(inc) = self.include(child) {
                        linkages.push(Linkage::Include(inc));
                    }
                }
                (_, "revision") => {
                    if let Some(rev) = self.revision(child, &mut ext_uses) {
                        revisions.push(rev);
                    }
                }
                (_, "extension") => {
                    if let Some(e) = self.extension(child, &mut ext_uses) {
                        bodies.push(Body::Extension(e));
                    }
                }
                (_, "typedef") => {
                    if let Some(t) = self.typedef(child) {
                        bodies.push(Body::Typedef(t));
                    }
                }
                (_, "grouping") => {
                    if let Some(g) = self.grouping(child) {
                        bodies.push(Body::Grouping(g));
                    }
                }
                (_, "rpc") => {
                    if let Some(r) = self.rpc(child) {
                        bodies.push(Body::Rpc(r));
                    }
                }
                (_, "notification") => {
                    if let Some(n) = self.notification(child) {
                        bodies.push(Body::Notification(n));
                    }
                }
                (_, kw) if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        bodies.push(Body::Data(d));
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, &raw.keyword),
            }
        }

        match kind {
            SpecKind::Module => {
                if namespace.is_none() || prefix.is_none() {
                    self.report(
                        DiagCode::MissingNamespaceOrPrefix,
                        &raw.span,
                        format!(
                            "module `{}` must declare both a namespace and a prefix",
                            name
                        ),
                    );
                }
            }
            SpecKind::Submodule => {
                if belongs_to.is_none() {
                    self.report(
                        DiagCode::MissingMandatorySubstatement,
                        &raw.span,
                        format!("submodule `{}` must have a belongs-to statement", name),
                    );
                }
            }
        }
        if revisions.is_empty() {
            self.report(
                DiagCode::MissingRevision,
                &raw.span,
                format!("specification `{}` should contain a revision statement", name),
            );
        }

        let header = match kind {
            SpecKind::Module => Header::Module {
                namespace,
                prefix,
                yang_version,
            },
            SpecKind::Submodule => Header::Submodule {
                belongs_to,
                yang_version,
            },
        };

        Specification {
            kind,
            name,
            header,
            metas,
            linkages,
            revisions,
            bodies,
            ext_uses,
            span: raw.span.clone(),
            raw: raw.clone(),
        }
    }

    fn import(&mut self, stmt: &RawStatement, sink: &mut Vec<ExtensionUse>) -> Option<Import> {
        let module_name = self.req_arg(stmt)?;
        let mut prefix = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "prefix" => self.once_arg(&mut prefix, child),
                _ => self.unknown_child(child, sink, "import"),
            }
        }
        let Some(prefix) = prefix else {
            self.report(
                DiagCode::MissingMandatorySubstatement,
                &stmt.span,
                format!("import of `{}` must declare a prefix", module_name),
            );
            return None;
        };
        Some(Import {
            module_name,
            prefix,
            span: stmt.span.clone(),
        })
    }

    fn include(&mut self, stmt: &RawStatement) -> Option<Include> {
        let submodule_name = self.leaf_arg(stmt)?;
        Some(Include {
            submodule_name,
            span: stmt.span.clone(),
        })
    }

    fn revision(&mut self, stmt: &RawStatement, sink: &mut Vec<ExtensionUse>) -> Option<Revision> {
        let date = self.req_arg(stmt)?;
        let mut description = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "description" => self.once_arg(&mut description, child),
                _ => self.unknown_child(child, sink, "revision"),
            }
        }
        Some(Revision {
            date,
            description,
            span: stmt.span.clone(),
        })
    }

    fn extension(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<Extension> {
        let name = self.req_arg(stmt)?;
        let mut argument = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "argument" => {
                    let decl = self.argument_decl(child, sink);
                    self.once(&mut argument, child, decl);
                }
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, sink, "extension"),
            }
        }
        Some(Extension {
            name,
            argument,
            status,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn argument_decl(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<ArgumentDecl> {
        let name = self.req_arg(stmt)?;
        let mut yin_element = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "yin-element" => self.once_bool(&mut yin_element, child),
                _ => self.unknown_child(child, sink, "argument"),
            }
        }
        Some(ArgumentDecl {
            name,
            yin_element,
            span: stmt.span.clone(),
        })
    }

    fn typedef(&mut self, stmt: &RawStatement) -> Option<Typedef> {
        let name = self.req_arg(stmt)?;
        let mut type_spec = None;
        let mut units = None;
        let mut default = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "type" => {
                    let ts = self.type_spec(child, &mut ext_uses);
                    self.once(&mut type_spec, child, ts);
                }
                "units" => self.once_arg(&mut units, child),
                "default" => self.once_arg(&mut default, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, &mut ext_uses, "typedef"),
            }
        }
        let Some(type_spec) = type_spec else {
            self.report(
                DiagCode::MissingMandatorySubstatement,
                &stmt.span,
                format!("typedef `{}` must contain a type statement", name),
            );
            return None;
        };
        Some(Typedef {
            name,
            type_spec,
            units,
            default,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn type_spec(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<TypeSpec> {
        let arg = self.req_arg(stmt)?;
        // `bits (32)`: the parser folds the width marker into the argument
        let (name, width) = match arg.split_once('(') {
            Some((head, tail)) => {
                let digits = tail.trim_end_matches(')').trim();
                match digits.parse::<u32>() {
                    Ok(w) if w > 0 => (head.trim().to_string(), Some(w)),
                    _ => {
                        self.report(
                            DiagCode::InvalidArgument,
                            &stmt.span,
                            format!("invalid width marker in `{}`", arg),
                        );
                        (head.trim().to_string(), None)
                    }
                }
            }
            None => (arg.clone(), None),
        };
        if name.is_empty() {
            self.report(
                DiagCode::InvalidArgument,
                &stmt.span,
                "type statement needs a type name".to_string(),
            );
            return None;
        }

        let mut enums = Vec::new();
        let mut restriction = width.map(Restriction::BitWidth);
        for child in &stmt.children {
            match child.keyword.as_str() {
                "enum" => {
                    if restriction.is_some() {
                        self.report(
                            DiagCode::MisplacedSubstatement,
                            &child.span,
                            "enum specifications cannot be mixed with a restriction".to_string(),
                        );
                    } else if let Some(e) = self.enum_spec(child, sink) {
                        enums.push(e);
                    }
                }
                "range" => {
                    let r = self.restriction_arg(child, RangeKind::Range).map(Restriction::Range);
                    self.set_restriction(&mut restriction, &enums, child, r);
                }
                "length" => {
                    let r = self
                        .restriction_arg(child, RangeKind::Length)
                        .map(Restriction::Length);
                    self.set_restriction(&mut restriction, &enums, child, r);
                }
                "pattern" => {
                    let r = self.leaf_arg(child).map(Restriction::Pattern);
                    self.set_restriction(&mut restriction, &enums, child, r);
                }
                "path" => {
                    let r = self.leaf_arg(child).map(Restriction::Path);
                    self.set_restriction(&mut restriction, &enums, child, r);
                }
                _ => self.unknown_child(child, sink, "type"),
            }
        }
        Some(TypeSpec {
            name,
            enums,
            restriction,
            span: stmt.span.clone(),
        })
    }

    fn set_restriction(
        &mut self,
        slot: &mut Option<Restriction>,
        enums: &[EnumSpec],
        child: &RawStatement,
        value: Option<Restriction>,
    ) {
        if !enums.is_empty() {
            self.report(
                DiagCode::MisplacedSubstatement,
                &child.span,
                "a restriction cannot be mixed with enum specifications".to_string(),
            );
            return;
        }
        if slot.is_some() {
            self.report(
                DiagCode::DuplicateSubstatement,
                &child.span,
                "type already carries a restriction; this one is ignored".to_string(),
            );
        } else if let Some(v) = value {
            *slot = Some(v);
        }
    }

    fn restriction_arg(&mut self, stmt: &RawStatement, kind: RangeKind) -> Option<Vec<RangeInterval>> {
        let text = self.leaf_arg(stmt)?;
        match parse_range_text(&text, kind) {
            Ok(ivs) => Some(ivs),
            Err(e) => {
                self.report(
                    DiagCode::InvalidArgument,
                    &stmt.span,
                    format!("cannot parse `{}`: {}", text, e),
                );
                None
            }
        }
    }

    fn enum_spec(&mut self, stmt: &RawStatement, sink: &mut Vec<ExtensionUse>) -> Option<EnumSpec> {
        let name = self.req_arg(stmt)?;
        let mut value = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "value" => {
                    let v = self.i64_arg(child);
                    self.once(&mut value, child, v);
                }
                "status" | "description" | "reference" => {
                    let mut ignored = None;
                    self.once_arg(&mut ignored, child);
                }
                _ => self.unknown_child(child, sink, "enum"),
            }
        }
        Some(EnumSpec {
            name,
            value,
            span: stmt.span.clone(),
        })
    }

    fn grouping(&mut self, stmt: &RawStatement) -> Option<Grouping> {
        let name = self.req_arg(stmt)?;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut typedefs = Vec::new();
        let mut groupings = Vec::new();
        let mut datadefs = Vec::new();
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                "typedef" => {
                    if let Some(t) = self.typedef(child) {
                        typedefs.push(t);
                    }
                }
                "grouping" => {
                    if let Some(g) = self.grouping(child) {
                        groupings.push(g);
                    }
                }
                kw if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, "grouping"),
            }
        }
        Some(Grouping {
            name,
            status,
            description,
            reference,
            typedefs,
            groupings,
            datadefs,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn datadef(&mut self, stmt: &RawStatement) -> Option<DataDef> {
        match stmt.keyword.as_str() {
            "container" => self.container(stmt).map(DataDef::Container),
            "leaf" => self.leaf(stmt).map(DataDef::Leaf),
            "leaf-list" => self.leaf_list(stmt).map(DataDef::LeafList),
            "list" => self.list(stmt).map(DataDef::List),
            "choice" => self.choice(stmt).map(DataDef::Choice),
            "anyxml" | "any-xml" => self.anyxml(stmt).map(DataDef::AnyXml),
            "uses" => self.uses(stmt).map(DataDef::Uses),
            "augment" => self.augment(stmt).map(DataDef::Augment),
            _ => unreachable!("datadef dispatch on `{}`", stmt.keyword),
        }
    }

    fn container(&mut self, stmt: &RawStatement) -> Option<Container> {
        let name = self.req_arg(stmt)?;
        let mut musts = Vec::new();
        let mut typedefs = Vec::new();
        let mut groupings = Vec::new();
        let mut datadefs = Vec::new();
        let mut presence = None;
        let mut config = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "must" => {
                    if let Some(m) = self.must(child, &mut ext_uses) {
                        musts.push(m);
                    }
                }
                "typedef" => {
                    if let Some(t) = self.typedef(child) {
                        typedefs.push(t);
                    }
                }
                "grouping" => {
                    if let Some(g) = self.grouping(child) {
                        groupings.push(g);
                    }
                }
                "presence" => self.once_bool(&mut presence, child),
                "config" => self.once_bool(&mut config, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, "container"),
            }
        }
        Some(Container {
            name,
            musts,
            typedefs,
            groupings,
            datadefs,
            presence,
            config,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn must(&mut self, stmt: &RawStatement, sink: &mut Vec<ExtensionUse>) -> Option<Must> {
        let condition = self.req_arg(stmt)?;
        let mut error_message = None;
        let mut error_app_tag = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "error-message" => self.once_arg(&mut error_message, child),
                "error-app-tag" => self.once_arg(&mut error_app_tag, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, sink, "must"),
            }
        }
        Some(Must {
            condition,
            error_message,
            error_app_tag,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn leaf(&mut self, stmt: &RawStatement) -> Option<Leaf> {
        let name = self.req_arg(stmt)?;
        let mut type_spec = None;
        let mut musts = Vec::new();
        let mut units = None;
        let mut default = None;
        let mut config = None;
        let mut mandatory = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "type" => {
                    let ts = self.type_spec(child, &mut ext_uses);
                    self.once(&mut type_spec, child, ts);
                }
                "must" => {
                    if let Some(m) = self.must(child, &mut ext_uses) {
                        musts.push(m);
                    }
                }
                "units" => self.once_arg(&mut units, child),
                "default" => self.once_arg(&mut default, child),
                "config" => self.once_bool(&mut config, child),
                "mandatory" => self.once_bool(&mut mandatory, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, &mut ext_uses, "leaf"),
            }
        }
        let Some(type_spec) = type_spec else {
            self.report(
                DiagCode::MissingMandatorySubstatement,
                &stmt.span,
                format!("leaf `{}` must contain one type statement", name),
            );
            return None;
        };
        Some(Leaf {
            name,
            type_spec,
            musts,
            units,
            default,
            config,
            mandatory,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn leaf_list(&mut self, stmt: &RawStatement) -> Option<LeafList> {
        let name = self.req_arg(stmt)?;
        let mut type_spec = None;
        let mut musts = Vec::new();
        let mut units = None;
        let mut default = None;
        let mut config = None;
        let mut min_elements = None;
        let mut max_elements = None;
        let mut mandatory = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "type" => {
                    let ts = self.type_spec(child, &mut ext_uses);
                    self.once(&mut type_spec, child, ts);
                }
                "must" => {
                    if let Some(m) = self.must(child, &mut ext_uses) {
                        musts.push(m);
                    }
                }
                "units" => self.once_arg(&mut units, child),
                "default" => self.once_arg(&mut default, child),
                "config" => self.once_bool(&mut config, child),
                "min-elements" => self.once_u64(&mut min_elements, child),
                "max-elements" => self.once_u64(&mut max_elements, child),
                "mandatory" => self.once_bool(&mut mandatory, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, &mut ext_uses, "leaf-list"),
            }
        }
        let Some(type_spec) = type_spec else {
            self.report(
                DiagCode::MissingMandatorySubstatement,
                &stmt.span,
                format!("leaf-list `{}` must contain one type statement", name),
            );
            return None;
        };
        Some(LeafList {
            name,
            type_spec,
            musts,
            units,
            default,
            config,
            min_elements,
            max_elements,
            mandatory,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn list(&mut self, stmt: &RawStatement) -> Option<ListNode> {
        let name = self.req_arg(stmt)?;
        let mut key: Option<String> = None;
        let mut key_span = None;
        let mut uniques = Vec::new();
        let mut musts = Vec::new();
        let mut typedefs = Vec::new();
        let mut groupings = Vec::new();
        let mut datadefs = Vec::new();
        let mut min_elements = None;
        let mut max_elements = None;
        let mut ordered_by = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "key" => {
                    if key.is_none() {
                        key_span = Some(child.span.clone());
                    }
                    self.once_arg(&mut key, child);
                }
                "unique" => {
                    if let Some(components) = self.leaf_arg(child) {
                        uniques.push(UniqueSpec {
                            components,
                            span: child.span.clone(),
                        });
                    }
                }
                "must" => {
                    if let Some(m) = self.must(child, &mut ext_uses) {
                        musts.push(m);
                    }
                }
                "typedef" => {
                    if let Some(t) = self.typedef(child) {
                        typedefs.push(t);
                    }
                }
                "grouping" => {
                    if let Some(g) = self.grouping(child) {
                        groupings.push(g);
                    }
                }
                "min-elements" => self.once_u64(&mut min_elements, child),
                "max-elements" => self.once_u64(&mut max_elements, child),
                "ordered-by" => self.once_arg(&mut ordered_by, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, "list"),
            }
        }
        if datadefs.is_empty() {
            self.report(
                DiagCode::ListWithoutDataDef,
                &stmt.span,
                format!("list `{}` must contain at least one data-def statement", name),
            );
            return None;
        }
        Some(ListNode {
            name,
            key,
            key_span,
            uniques,
            musts,
            typedefs,
            groupings,
            datadefs,
            min_elements,
            max_elements,
            ordered_by,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn choice(&mut self, stmt: &RawStatement) -> Option<Choice> {
        let name = self.req_arg(stmt)?;
        let mut arms = Vec::new();
        let mut default = None;
        let mut mandatory = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "case" => {
                    if let Some(c) = self.case(child, &mut ext_uses) {
                        arms.push(CaseArm::Case(c));
                    }
                }
                // a short case is a bare node; uses/augment are not allowed here
                "container" | "leaf" | "leaf-list" | "list" | "anyxml" | "any-xml" => {
                    if let Some(d) = self.datadef(child) {
                        arms.push(CaseArm::Short(d));
                    }
                }
                "default" => self.once_arg(&mut default, child),
                "mandatory" => self.once_bool(&mut mandatory, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, &mut ext_uses, "choice"),
            }
        }
        Some(Choice {
            name,
            arms,
            default,
            mandatory,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn case(&mut self, stmt: &RawStatement, sink: &mut Vec<ExtensionUse>) -> Option<Case> {
        let name = self.req_arg(stmt)?;
        let mut datadefs = Vec::new();
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                // case-data-def: everything but a nested choice
                "container" | "leaf" | "leaf-list" | "list" | "anyxml" | "any-xml" | "uses"
                | "augment" => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, sink, "case"),
            }
        }
        Some(Case {
            name,
            datadefs,
            status,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn anyxml(&mut self, stmt: &RawStatement) -> Option<AnyXml> {
        let name = self.req_arg(stmt)?;
        let mut config = None;
        let mut mandatory = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "config" => self.once_bool(&mut config, child),
                "mandatory" => self.once_bool(&mut mandatory, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, &mut ext_uses, "anyxml"),
            }
        }
        Some(AnyXml {
            name,
            config,
            mandatory,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn uses(&mut self, stmt: &RawStatement) -> Option<Uses> {
        let grouping_ref = self.req_arg(stmt)?;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut refinements = Vec::new();
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if refinement_keyword(kw) => {
                    if let Some(r) = self.refinement(child, &mut ext_uses) {
                        refinements.push(r);
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, "uses"),
            }
        }
        Some(Uses {
            grouping_ref,
            status,
            description,
            reference,
            refinements,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn refinement(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<Refinement> {
        match stmt.keyword.as_str() {
            "container" => self.refine_container(stmt, sink).map(Refinement::Container),
            "leaf" => self.refine_leaf(stmt, sink).map(Refinement::Leaf),
            "leaf-list" => self.refine_leaf_list(stmt, sink).map(Refinement::LeafList),
            "list" => self.refine_list(stmt, sink).map(Refinement::List),
            "choice" => self.refine_choice(stmt, sink).map(Refinement::Choice),
            "anyxml" | "any-xml" => self.refine_anyxml(stmt, sink).map(Refinement::AnyXml),
            _ => unreachable!("refinement dispatch on `{}`", stmt.keyword),
        }
    }

    fn refine_container(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<RefineContainer> {
        let name = self.req_arg(stmt)?;
        let mut musts = Vec::new();
        let mut refinements = Vec::new();
        let mut presence = None;
        let mut config = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "must" => {
                    if let Some(m) = self.must(child, sink) {
                        musts.push(m);
                    }
                }
                "presence" => self.once_bool(&mut presence, child),
                "config" => self.once_bool(&mut config, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if refinement_keyword(kw) => {
                    if let Some(r) = self.refinement(child, sink) {
                        refinements.push(r);
                    }
                }
                _ => self.unknown_child(child, sink, "refined container"),
            }
        }
        Some(RefineContainer {
            name,
            musts,
            refinements,
            presence,
            config,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn refine_leaf(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<RefineLeaf> {
        let name = self.req_arg(stmt)?;
        let mut musts = Vec::new();
        let mut default = None;
        let mut config = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "must" => {
                    if let Some(m) = self.must(child, sink) {
                        musts.push(m);
                    }
                }
                "default" => self.once_arg(&mut default, child),
                "config" => self.once_bool(&mut config, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, sink, "refined leaf"),
            }
        }
        Some(RefineLeaf {
            name,
            musts,
            default,
            config,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn refine_leaf_list(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<RefineLeafList> {
        let name = self.req_arg(stmt)?;
        let mut musts = Vec::new();
        let mut config = None;
        let mut min_elements = None;
        let mut max_elements = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "must" => {
                    if let Some(m) = self.must(child, sink) {
                        musts.push(m);
                    }
                }
                "config" => self.once_bool(&mut config, child),
                "min-elements" => self.once_u64(&mut min_elements, child),
                "max-elements" => self.once_u64(&mut max_elements, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, sink, "refined leaf-list"),
            }
        }
        Some(RefineLeafList {
            name,
            musts,
            config,
            min_elements,
            max_elements,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn refine_list(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<RefineList> {
        let name = self.req_arg(stmt)?;
        let mut musts = Vec::new();
        let mut refinements = Vec::new();
        let mut config = None;
        let mut min_elements = None;
        let mut max_elements = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "must" => {
                    if let Some(m) = self.must(child, sink) {
                        musts.push(m);
                    }
                }
                "config" => self.once_bool(&mut config, child),
                "min-elements" => self.once_u64(&mut min_elements, child),
                "max-elements" => self.once_u64(&mut max_elements, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if refinement_keyword(kw) => {
                    if let Some(r) = self.refinement(child, sink) {
                        refinements.push(r);
                    }
                }
                _ => self.unknown_child(child, sink, "refined list"),
            }
        }
        Some(RefineList {
            name,
            musts,
            refinements,
            config,
            min_elements,
            max_elements,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn refine_choice(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<RefineChoice> {
        let name = self.req_arg(stmt)?;
        let mut cases = Vec::new();
        let mut default = None;
        let mut mandatory = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "case" => {
                    if let Some(c) = self.refine_case(child, sink) {
                        cases.push(c);
                    }
                }
                "default" => self.once_arg(&mut default, child),
                "mandatory" => self.once_bool(&mut mandatory, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, sink, "refined choice"),
            }
        }
        Some(RefineChoice {
            name,
            cases,
            default,
            mandatory,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn refine_case(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<RefineCase> {
        let name = self.req_arg(stmt)?;
        let mut refinements = Vec::new();
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if refinement_keyword(kw) => {
                    if let Some(r) = self.refinement(child, sink) {
                        refinements.push(r);
                    }
                }
                _ => self.unknown_child(child, sink, "refined case"),
            }
        }
        Some(RefineCase {
            name,
            refinements,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn refine_anyxml(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<RefineAnyXml> {
        let name = self.req_arg(stmt)?;
        let mut config = None;
        let mut mandatory = None;
        let mut description = None;
        let mut reference = None;
        for child in &stmt.children {
            match child.keyword.as_str() {
                "config" => self.once_bool(&mut config, child),
                "mandatory" => self.once_bool(&mut mandatory, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                _ => self.unknown_child(child, sink, "refined anyxml"),
            }
        }
        Some(RefineAnyXml {
            name,
            config,
            mandatory,
            description,
            reference,
            span: stmt.span.clone(),
        })
    }

    fn augment(&mut self, stmt: &RawStatement) -> Option<Augment> {
        let target_text = self.req_arg(stmt)?;
        let target = match SchemaNodeId::parse(&target_text) {
            Ok(t) => t,
            Err(e) => {
                self.report(
                    DiagCode::InvalidArgument,
                    &stmt.span,
                    format!("bad augment target `{}`: {}", target_text, e),
                );
                return None;
            }
        };
        let mut datadefs = Vec::new();
        let mut cases = Vec::new();
        let mut input = None;
        let mut output = None;
        let mut when = None;
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "case" => {
                    if let Some(c) = self.case(child, &mut ext_uses) {
                        cases.push(c);
                    }
                }
                "input" => {
                    let b = self.node_block(child, &mut ext_uses);
                    self.once(&mut input, child, b);
                }
                "output" => {
                    let b = self.node_block(child, &mut ext_uses);
                    self.once(&mut output, child, b);
                }
                "when" => self.once_arg(&mut when, child),
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, "augment"),
            }
        }
        if datadefs.is_empty() && cases.is_empty() && input.is_none() && output.is_none() {
            self.report(
                DiagCode::MissingMandatorySubstatement,
                &stmt.span,
                format!(
                    "augment `{}` must carry at least one data-def, case, input or output",
                    target_text
                ),
            );
            return None;
        }
        Some(Augment {
            target,
            target_text,
            datadefs,
            cases,
            input,
            output,
            when,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn node_block(
        &mut self,
        stmt: &RawStatement,
        sink: &mut Vec<ExtensionUse>,
    ) -> Option<NodeBlock> {
        if stmt.argument.is_some() {
            self.report(
                DiagCode::InvalidArgument,
                &stmt.span,
                format!("`{}` takes no argument", stmt.keyword),
            );
        }
        let mut typedefs = Vec::new();
        let mut groupings = Vec::new();
        let mut datadefs = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "typedef" => {
                    if let Some(t) = self.typedef(child) {
                        typedefs.push(t);
                    }
                }
                "grouping" => {
                    if let Some(g) = self.grouping(child) {
                        groupings.push(g);
                    }
                }
                kw if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                _ => self.unknown_child(child, sink, &stmt.keyword),
            }
        }
        Some(NodeBlock {
            typedefs,
            groupings,
            datadefs,
            span: stmt.span.clone(),
        })
    }

    fn rpc(&mut self, stmt: &RawStatement) -> Option<Rpc> {
        let name = self.req_arg(stmt)?;
        let mut input = None;
        let mut output = None;
        let mut typedefs = Vec::new();
        let mut groupings = Vec::new();
        let mut datadefs = Vec::new();
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "input" => {
                    let b = self.node_block(child, &mut ext_uses);
                    self.once(&mut input, child, b);
                }
                "output" => {
                    let b = self.node_block(child, &mut ext_uses);
                    self.once(&mut output, child, b);
                }
                "typedef" => {
                    if let Some(t) = self.typedef(child) {
                        typedefs.push(t);
                    }
                }
                "grouping" => {
                    if let Some(g) = self.grouping(child) {
                        groupings.push(g);
                    }
                }
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, "rpc"),
            }
        }
        Some(Rpc {
            name,
            input,
            output,
            typedefs,
            groupings,
            datadefs,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }

    fn notification(&mut self, stmt: &RawStatement) -> Option<Notification> {
        let name = self.req_arg(stmt)?;
        let mut typedefs = Vec::new();
        let mut groupings = Vec::new();
        let mut datadefs = Vec::new();
        let mut status = None;
        let mut description = None;
        let mut reference = None;
        let mut ext_uses = Vec::new();
        for child in &stmt.children {
            match child.keyword.as_str() {
                "typedef" => {
                    if let Some(t) = self.typedef(child) {
                        typedefs.push(t);
                    }
                }
                "grouping" => {
                    if let Some(g) = self.grouping(child) {
                        groupings.push(g);
                    }
                }
                "status" => self.once_arg(&mut status, child),
                "description" => self.once_arg(&mut description, child),
                "reference" => self.once_arg(&mut reference, child),
                kw if is_datadef_keyword(kw) => {
                    if let Some(d) = self.datadef(child) {
                        datadefs.push(d);
                    }
                }
                _ => self.unknown_child(child, &mut ext_uses, "notification"),
            }
        }
        Some(Notification {
            name,
            typedefs,
            groupings,
            datadefs,
            status,
            description,
            reference,
            span: stmt.span.clone(),
            ext_uses,
        })
    }
}

fn refinement_keyword(kw: &str) -> bool {
    matches!(
        kw,
        "container" | "leaf" | "leaf-list" | "list" | "choice" | "anyxml" | "any-xml"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lex::tokenize;
    use crate::syntax::parse;

    fn spec_of(src: &str) -> (Specification, Diagnostics) {
        let toks = tokenize(src, "t.yang").unwrap();
        let raw = parse(&toks, "t.yang").unwrap();
        build(&raw)
    }

    fn clean_spec(src: &str) -> Specification {
        let (spec, diags) = spec_of(src);
        let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        assert!(errors.is_empty(), "unexpected diagnostics: {:?}", errors);
        spec
    }

    const HEADER: &str = "namespace \"urn:x\"; prefix m; revision 2008-01-01;";

    #[test]
    fn counter32_typedef() {
        let spec = clean_spec(&format!(
            "module m {{ {HEADER}
               typedef counter32 {{
                 type uint32;
                 description \"The counter32 type represents...\";
                 reference \"RFC 2578 (STD 58)\";
               }} }}"
        ));
        let td = spec.typedefs().next().unwrap();
        assert_eq!(td.name, "counter32");
        assert_eq!(td.type_spec.name, "uint32");
        assert!(td.description.is_some());
        assert_eq!(td.reference.as_deref(), Some("RFC 2578 (STD 58)"));
    }

    #[test]
    fn duplicate_meta_is_dropped_but_module_returned() {
        let (spec, diags) = spec_of(&format!(
            "module m {{ {HEADER} contact \"first\"; contact \"second\"; }}"
        ));
        assert!(diags.has_code(DiagCode::DuplicateSubstatement));
        assert_eq!(spec.metas.contact.as_deref(), Some("first"));
    }

    #[test]
    fn interfaces_list_shape() {
        let spec = clean_spec(&format!(
            "module m {{ {HEADER}
               list interfaces {{
                 key index;
                 leaf index {{ type int8; }}
                 leaf name {{ type string; }}
                 leaf type {{ type string; }}
                 leaf speed {{ type int64; }}
               }} }}"
        ));
        let Some(Body::Data(DataDef::List(list))) = spec.bodies.first() else {
            panic!("expected a list body");
        };
        assert_eq!(list.name, "interfaces");
        assert_eq!(list.key.as_deref(), Some("index"));
        assert_eq!(list.datadefs.len(), 4);
        assert!(matches!(list.datadefs[0], DataDef::Leaf(ref l) if l.name == "index"));
    }

    #[test]
    fn typedef_without_type_is_skipped() {
        let (spec, diags) = spec_of(&format!(
            "module m {{ {HEADER} typedef broken {{ description \"no type\"; }} leaf ok {{ type int8; }} }}"
        ));
        assert!(diags.has_code(DiagCode::MissingMandatorySubstatement));
        assert!(spec.typedefs().next().is_none());
        // building continued past the skipped block
        assert!(matches!(spec.bodies.last(), Some(Body::Data(DataDef::Leaf(_)))));
    }

    #[test]
    fn list_without_datadef_is_skipped() {
        let (spec, diags) = spec_of(&format!(
            "module m {{ {HEADER} list empty {{ key x; }} }}"
        ));
        assert!(diags.has_code(DiagCode::ListWithoutDataDef));
        assert!(spec.bodies.is_empty());
    }

    #[test]
    fn missing_namespace_or_prefix() {
        let (_, diags) = spec_of("module m { prefix m; revision 2008-01-01; }");
        assert!(diags.has_code(DiagCode::MissingNamespaceOrPrefix));
        let (_, diags) = spec_of("submodule s { revision 2008-01-01; }");
        assert!(diags.has_code(DiagCode::MissingMandatorySubstatement));
    }

    #[test]
    fn missing_revision_is_a_warning_only() {
        let (_, diags) = spec_of("module m { namespace \"urn:x\"; prefix m; }");
        assert!(diags.has_code(DiagCode::MissingRevision));
        assert!(!diags.has_errors());
    }

    #[test]
    fn bad_boolean_argument() {
        let (_, diags) = spec_of(&format!(
            "module m {{ {HEADER} container c {{ config maybe; leaf l {{ type int8; }} }} }}"
        ));
        assert!(diags.has_code(DiagCode::InvalidArgument));
    }

    #[test]
    fn unknown_unprefixed_keyword_is_misplaced() {
        let (_, diags) = spec_of(&format!("module m {{ {HEADER} nonsense x; }}"));
        assert!(diags.has_code(DiagCode::MisplacedSubstatement));
    }

    #[test]
    fn prefixed_keyword_becomes_extension_use() {
        let spec = clean_spec(&format!(
            "module m {{ {HEADER}
               extension c-define {{ argument \"name\"; }}
               myext:c-define \"MY_INTERFACES\";
               leaf l {{ type int8 {{ myext:c-define \"L\"; }} }} }}"
        ));
        assert_eq!(spec.ext_uses.len(), 1);
        let e = &spec.ext_uses[0];
        assert_eq!(e.prefix, "myext");
        assert_eq!(e.name, "c-define");
        assert_eq!(e.argument.as_deref(), Some("MY_INTERFACES"));
        // the one inside the leaf's type attaches to the leaf
        let Some(Body::Data(DataDef::Leaf(l))) = spec.bodies.last() else {
            panic!("expected leaf");
        };
        assert_eq!(l.ext_uses.len(), 1);
    }

    #[test]
    fn bits_width_marker_becomes_restriction() {
        let spec = clean_spec(&format!(
            "module m {{ {HEADER} leaf ip {{ type bits (32); }} }}"
        ));
        let Some(Body::Data(DataDef::Leaf(l))) = spec.bodies.first() else {
            panic!("expected leaf");
        };
        assert_eq!(l.type_spec.name, "bits");
        assert_eq!(l.type_spec.restriction, Some(Restriction::BitWidth(32)));
    }

    #[test]
    fn augment_needs_payload() {
        let (spec, diags) = spec_of(&format!(
            "module m {{ {HEADER} augment a/b {{ description \"empty\"; }} }}"
        ));
        assert!(diags.has_code(DiagCode::MissingMandatorySubstatement));
        assert!(spec.bodies.is_empty());
    }

    #[test]
    fn body_and_revision_order_is_preserved() {
        let spec = clean_spec(
            "module m { namespace \"urn:x\"; prefix m;
               revision 2008-02-01; revision 2008-01-01;
               leaf b { type int8; }
               container a { }
               leaf c { type int8; } }",
        );
        let names: Vec<&str> = spec
            .bodies
            .iter()
            .map(|b| match b {
                Body::Data(d) => d.name(),
                _ => panic!(),
            })
            .collect();
        assert_eq!(names, ["b", "a", "c"]);
        let dates: Vec<&str> = spec.revisions.iter().map(|r| r.date.as_str()).collect();
        assert_eq!(dates, ["2008-02-01", "2008-01-01"]);
    }

    #[test]
    fn choice_arms_full_and_short() {
        let spec = clean_spec(&format!(
            "module m {{ {HEADER}
               choice transfer {{
                 case interval {{ leaf minutes {{ type uint16; }} }}
                 leaf manual {{ type string; }}
                 default interval;
               }} }}"
        ));
        let Some(Body::Data(DataDef::Choice(c))) = spec.bodies.first() else {
            panic!("expected choice");
        };
        assert_eq!(c.arms.len(), 2);
        assert_eq!(c.arms[0].name(), "interval");
        assert_eq!(c.arms[1].name(), "manual");
        assert_eq!(c.default.as_deref(), Some("interval"));
    }

    #[test]
    fn rpc_with_input_output() {
        let spec = clean_spec(&format!(
            "module m {{ {HEADER}
               rpc activate-software-image {{
                 input {{ leaf image-name {{ type string; }} }}
                 output {{ leaf status {{ type string; }} }}
               }} }}"
        ));
        let Some(Body::Rpc(rpc)) = spec.bodies.first() else {
            panic!("expected rpc");
        };
        assert_eq!(rpc.name, "activate-software-image");
        assert_eq!(rpc.input.as_ref().unwrap().datadefs.len(), 1);
        assert_eq!(rpc.output.as_ref().unwrap().datadefs.len(), 1);
    }

    #[test]
    fn n_duplicates_keep_one_value_and_emit_n_minus_one_diags() {
        for n in 2..=5 {
            let contacts: String =
                (0..n).map(|i| format!("contact \"c{}\"; ", i)).collect();
            let (spec, diags) = spec_of(&format!("module m {{ {HEADER} {contacts} }}"));
            assert_eq!(spec.metas.contact.as_deref(), Some("c0"));
            let dups = diags
                .iter()
                .filter(|d| d.code == DiagCode::DuplicateSubstatement)
                .count();
            assert_eq!(dups, n - 1);
        }
    }
}
