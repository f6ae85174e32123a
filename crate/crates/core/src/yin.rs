//! YIN emission: the XML rendering of a specification.
//!
//! Every statement becomes an element named by its keyword. The statement
//! argument is rendered per a fixed keyword table ([`argument_slot`]):
//! most keywords carry it as an attribute, prose-bearing keywords
//! (description, reference, contact, organization, error-message) as a
//! `<text>` child element. Extension uses consult the extension's
//! `argument`/`yin-element` declaration. Output is deterministic:
//! two-space indent, LF line endings, UTF-8.

use crate::ast::Specification;
use crate::syntax::RawStatement;
use std::fmt;

/// Namespace the root element is emitted in. Overridable through
/// [`emit_yin_with_namespace`].
pub const DEFAULT_YIN_NAMESPACE: &str = "urn:ietf:params:xml:ns:yang:yin:1";

/// How a keyword's argument is rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgSlot {
    Attribute(&'static str),
    Element(&'static str),
    None,
}

/// The pinned keyword table. Unlisted keywords default to a `value`
/// attribute so that emission stays total.
pub fn argument_slot(keyword: &str) -> ArgSlot {
    use ArgSlot::*;
    match keyword {
        "anyxml" | "any-xml" | "argument" | "base" | "bit" | "case" | "choice" | "container"
        | "enum" | "extension" | "feature" | "grouping" | "identity" | "if-feature" | "leaf"
        | "leaf-list" | "list" | "module" | "notification" | "rpc" | "submodule" | "type"
        | "typedef" | "units" | "uses" => Attribute("name"),
        "augment" | "deviation" | "refine" => Attribute("target-node"),
        "belongs-to" | "import" | "include" => Attribute("module"),
        "namespace" => Attribute("uri"),
        "revision" | "revision-date" => Attribute("date"),
        "must" | "when" => Attribute("condition"),
        "unique" => Attribute("tag"),
        "key" | "config" | "default" | "deviate" | "error-app-tag" | "fraction-digits"
        | "length" | "mandatory" | "max-elements" | "min-elements" | "ordered-by" | "path"
        | "pattern" | "position" | "prefix" | "presence" | "range" | "require-instance"
        | "status" | "value" | "yang-version" | "yin-element" => Attribute("value"),
        "contact" | "description" | "organization" | "reference" => Element("text"),
        "error-message" => Element("value"),
        "input" | "output" => None,
        _ => Attribute("value"),
    }
}

/// Argument rendering for an extension use, from the extension's own
/// declaration when the prefix is the module's and the extension is
/// declared locally; `(name, as_element)`.
pub fn extension_argument_slot(spec: &Specification, prefix: &str, name: &str) -> (String, bool) {
    if spec.own_prefix() == Some(prefix) {
        if let Some(ext) = spec.extensions().find(|e| e.name == name) {
            if let Some(decl) = &ext.argument {
                return (decl.name.clone(), decl.yin_element == Some(true));
            }
        }
    }
    ("value".to_string(), false)
}

/// A rendered YIN document. Byte-identical across runs for the same
/// specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YinDocument {
    pub text: String,
}

impl fmt::Display for YinDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl YinDocument {
    pub fn as_bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }
}

pub fn emit_yin(spec: &Specification) -> YinDocument {
    emit_yin_with_namespace(spec, DEFAULT_YIN_NAMESPACE)
}

pub fn emit_yin_with_namespace(spec: &Specification, yin_ns: &str) -> YinDocument {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let emitter = Emitter { spec, yin_ns };
    emitter.element(&spec.raw, 0, &mut out);
    YinDocument { text: out }
}

struct Emitter<'s> {
    spec: &'s Specification,
    yin_ns: &'s str,
}

impl Emitter<'_> {
    fn element(&self, stmt: &RawStatement, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        out.push('<');
        out.push_str(&stmt.keyword);
        if depth == 0 {
            self.namespace_attrs(out);
        }

        // where does the argument go?
        let (prefix, bare) = match stmt.keyword.split_once(':') {
            Some((p, n)) => (Some(p), n),
            None => (None, &stmt.keyword[..]),
        };
        let mut arg_element: Option<(String, &str)> = None;
        if let Some(arg) = &stmt.argument {
            match prefix {
                Some(p) => {
                    let (slot_name, as_element) = extension_argument_slot(self.spec, p, bare);
                    if as_element {
                        arg_element = Some((format!("{}:{}", p, slot_name), arg));
                    } else {
                        push_attr(out, &slot_name, arg);
                    }
                }
                None => match argument_slot(bare) {
                    ArgSlot::Attribute(name) => push_attr(out, name, arg),
                    ArgSlot::Element(name) => arg_element = Some((name.to_string(), arg)),
                    ArgSlot::None => {}
                },
            }
        }

        if stmt.children.is_empty() && arg_element.is_none() {
            out.push_str("/>\n");
            return;
        }
        out.push_str(">\n");
        if let Some((name, text)) = arg_element {
            out.push_str(&pad);
            out.push_str("  <");
            out.push_str(&name);
            out.push('>');
            out.push_str(&escape_text(text));
            out.push_str("</");
            out.push_str(&name);
            out.push_str(">\n");
        }
        for child in &stmt.children {
            out.push_str(&pad);
            out.push_str("  ");
            self.element(child, depth + 1, out);
        }
        out.push_str(&pad);
        out.push_str("</");
        out.push_str(&stmt.keyword);
        out.push_str(">\n");
    }

    /// xmlns declarations on the root: the YIN namespace, the module's own
    /// prefix bound to its namespace statement, and a placeholder URI for
    /// any other prefix appearing in extension-use keywords.
    fn namespace_attrs(&self, out: &mut String) {
        push_attr(out, "xmlns", self.yin_ns);
        let mut prefixes = Vec::new();
        collect_keyword_prefixes(&self.spec.raw, &mut prefixes);
        prefixes.sort_unstable();
        prefixes.dedup();
        for p in prefixes {
            let uri = if self.spec.own_prefix() == Some(p.as_str()) {
                self.spec
                    .namespace()
                    .map(str::to_string)
                    .unwrap_or_else(|| format!("urn:prefix:{}", p))
            } else {
                format!("urn:prefix:{}", p)
            };
            push_attr(out, &format!("xmlns:{}", p), &uri);
        }
    }
}

fn collect_keyword_prefixes(stmt: &RawStatement, out: &mut Vec<String>) {
    if let Some((p, _)) = stmt.keyword.split_once(':') {
        out.push(p.to_string());
    }
    for child in &stmt.children {
        collect_keyword_prefixes(child, out);
    }
}

fn push_attr(out: &mut String, name: &str, value: &str) {
    out.push(' ');
    out.push_str(name);
    out.push_str("=\"");
    out.push_str(&escape_attr(value));
    out.push('"');
}

/// Attribute escaping; whitespace is escaped numerically so XML
/// attribute-value normalization cannot alter round-tripped arguments.
fn escape_attr(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
    out
}

fn escape_text(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::build;
    use crate::lex::tokenize;
    use crate::syntax::parse;

    fn spec_of(src: &str) -> Specification {
        let toks = tokenize(src, "t.yang").unwrap();
        let raw = parse(&toks, "t.yang").unwrap();
        build(&raw).0
    }

    const HEADER: &str = "namespace \"urn:t\"; prefix t; revision 2008-01-01;";

    #[test]
    fn prefix_renders_as_value_attribute() {
        let spec = spec_of("module router { namespace \"urn:r\"; prefix router; revision 2008-01-01; }");
        let doc = emit_yin(&spec);
        assert!(doc.text.contains("<prefix value=\"router\"/>"));

        // verified with an independent XML parser
        let parsed = roxmltree::Document::parse(&doc.text).unwrap();
        let prefix = parsed
            .descendants()
            .find(|n| n.has_tag_name((DEFAULT_YIN_NAMESPACE, "prefix")))
            .unwrap();
        assert_eq!(prefix.attribute("value"), Some("router"));
    }

    #[test]
    fn minimal_module_has_only_header_children() {
        let spec = spec_of(&format!("module t {{ {HEADER} }}"));
        let doc = emit_yin(&spec);
        let parsed = roxmltree::Document::parse(&doc.text).unwrap();
        let root = parsed.root_element();
        assert_eq!(root.tag_name().name(), "module");
        assert_eq!(root.attribute("name"), Some("t"));
        let children: Vec<&str> = root
            .children()
            .filter(|n| n.is_element())
            .map(|n| n.tag_name().name())
            .collect();
        assert_eq!(children, ["namespace", "prefix", "revision"]);
    }

    #[test]
    fn description_argument_is_a_text_element() {
        let text = "A link failure has been detected";
        let spec = spec_of(&format!(
            "module t {{ {HEADER} description \"{text}\"; }}"
        ));
        let doc = emit_yin(&spec);
        let parsed = roxmltree::Document::parse(&doc.text).unwrap();
        let extracted = parsed
            .descendants()
            .find(|n| n.has_tag_name((DEFAULT_YIN_NAMESPACE, "text")))
            .unwrap()
            .text()
            .unwrap();
        assert_eq!(extracted, text);
    }

    #[test]
    fn extension_argument_attribute_or_element() {
        let spec = spec_of(&format!(
            "module t {{ {HEADER}
               extension c-define {{ argument \"name\"; }}
               t:c-define \"MY_INTERFACES\"; }}"
        ));
        let doc = emit_yin(&spec);
        assert!(doc.text.contains("<t:c-define name=\"MY_INTERFACES\"/>"));

        let spec = spec_of(&format!(
            "module t {{ {HEADER}
               extension c-define {{ argument \"name\" {{ yin-element true; }} }}
               t:c-define \"MY_INTERFACES\"; }}"
        ));
        let doc = emit_yin(&spec);
        assert!(doc.text.contains("<t:name>MY_INTERFACES</t:name>"));
        // namespace-aware parsers accept the output: the prefix is declared
        roxmltree::Document::parse(&doc.text).unwrap();
    }

    #[test]
    fn attribute_escaping_survives_xml_normalization() {
        let spec = spec_of(&format!(
            "module t {{ {HEADER} leaf l {{ type string; default \"a&b\\n<c>\\t'q'\"; }} }}"
        ));
        let doc = emit_yin(&spec);
        let parsed = roxmltree::Document::parse(&doc.text).unwrap();
        let default = parsed
            .descendants()
            .find(|n| n.has_tag_name((DEFAULT_YIN_NAMESPACE, "default")))
            .unwrap();
        assert_eq!(default.attribute("value"), Some("a&b\n<c>\t'q'"));
    }

    #[test]
    fn output_is_byte_stable() {
        let spec = spec_of(&format!(
            "module t {{ {HEADER}
               container c {{ leaf x {{ type int8; }} }}
               rpc r {{ input {{ leaf a {{ type string; }} }} }} }}"
        ));
        assert_eq!(emit_yin(&spec).text, emit_yin(&spec).text);
        assert!(!emit_yin(&spec).text.contains('\r'));
    }

    #[test]
    fn custom_namespace_is_used() {
        let spec = spec_of(&format!("module t {{ {HEADER} }}"));
        let doc = emit_yin_with_namespace(&spec, "urn:other:yin");
        assert!(doc.text.contains("xmlns=\"urn:other:yin\""));
    }
}
