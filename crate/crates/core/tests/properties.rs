//! Property tests for the front-end invariants: lex idempotence, span
//! monotonicity, statement-tree round-trips, and build totality.

use proptest::prelude::*;
use yangc_core::build::build;
use yangc_core::lex::{tokenize, TokenKind};
use yangc_core::span::SourceSpan;
use yangc_core::syntax::{parse, RawStatement};

/// Words the lexer accepts unquoted, plus punctuation.
fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z0-9_-]{0,6}",
        "[0-9]{1,4}",
        "[0-9]{4}-[0-9]{2}-[0-9]{2}",
        "[a-z]{1,3}:[a-z]{1,3}",
        "[a-z]{1,3}/[a-z]{1,3}(/[a-z]{1,3})?",
        Just("{".to_string()),
        Just("}".to_string()),
        Just(";".to_string()),
        Just("+".to_string()),
        Just("(32)".to_string()),
    ]
}

fn whitespace() -> impl Strategy<Value = String> {
    prop_oneof![
        Just(" ".to_string()),
        Just("  ".to_string()),
        Just("\n".to_string()),
        Just("\t".to_string()),
        Just(" \n ".to_string()),
    ]
}

fn comment_free_source() -> impl Strategy<Value = String> {
    (
        proptest::collection::vec((word(), whitespace()), 0..40),
    )
        .prop_map(|(parts,)| {
            let mut src = String::new();
            for (w, ws) in parts {
                src.push_str(&w);
                src.push_str(&ws);
            }
            src
        })
}

proptest! {
    /// Re-tokenizing the whitespace-join of all token texts gives the
    /// same token sequence (comment-free sources without strings).
    #[test]
    fn lex_is_idempotent(src in comment_free_source()) {
        let first = tokenize(&src, "a.yang").unwrap();
        prop_assert!(first.iter().all(|t| t.kind != TokenKind::String));
        let rejoined: Vec<String> = first.iter().map(|t| t.text.clone()).collect();
        let second = tokenize(&rejoined.join(" "), "b.yang").unwrap();
        prop_assert_eq!(first.len(), second.len());
        for (a, b) in first.iter().zip(&second) {
            prop_assert_eq!(a.kind, b.kind);
            prop_assert_eq!(&a.text, &b.text);
        }
    }

    /// Token spans are in bounds, non-overlapping and strictly increasing.
    #[test]
    fn token_spans_are_monotonic(src in comment_free_source()) {
        let tokens = tokenize(&src, "a.yang").unwrap();
        let line_count = src.lines().count().max(1) as u32;
        let mut prev = (0u32, 0u32);
        for t in &tokens {
            prop_assert!(t.span.start_line >= 1 && t.span.start_col >= 1);
            prop_assert!(t.span.end_line <= line_count + 1);
            prop_assert!(t.span.start() <= t.span.end());
            prop_assert!(t.span.start() > prev, "span overlap at {:?}", t);
            prev = t.span.end();
        }
    }
}

// -- statement tree round-trip ------------------------------------------

fn keyword() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z0-9-]{0,8}",
        "[a-z]{1,4}:[a-z][a-z0-9-]{0,6}",
    ]
}

fn argument() -> impl Strategy<Value = Option<String>> {
    proptest::option::of(prop_oneof![
        "[ -~]{0,12}",                 // printable ASCII, quotes and backslashes included
        Just("multi\nline\ttext".to_string()),
        Just(String::new()),
    ])
}

fn statement(depth: u32) -> BoxedStrategy<RawStatement> {
    let leaf = (keyword(), argument()).prop_map(|(keyword, argument)| RawStatement {
        keyword,
        argument,
        children: Vec::new(),
        span: SourceSpan::point("gen", 1, 1),
    });
    leaf.prop_recursive(depth, 24, 4, |inner| {
        (keyword(), argument(), proptest::collection::vec(inner, 0..4)).prop_map(
            |(keyword, argument, children)| RawStatement {
                keyword,
                argument,
                children,
                span: SourceSpan::point("gen", 1, 1),
            },
        )
    })
    .boxed()
}

fn module_tree() -> impl Strategy<Value = RawStatement> {
    ("[a-z][a-z0-9-]{0,8}", proptest::collection::vec(statement(3), 0..5)).prop_map(
        |(name, children)| RawStatement {
            keyword: "module".to_string(),
            argument: Some(name),
            children,
            span: SourceSpan::point("gen", 1, 1),
        },
    )
}

proptest! {
    /// Canonical serialization re-parses to a structurally identical tree.
    #[test]
    fn statement_tree_round_trips(tree in module_tree()) {
        let text = tree.to_yang();
        let tokens = tokenize(&text, "rt.yang").unwrap();
        let reparsed = parse(&tokens, "rt.yang").unwrap();
        prop_assert!(tree.same_shape(&reparsed), "canonical text:\n{}", text);
    }

    /// The build pass is total: any parsed tree yields a Specification,
    /// whatever diagnostics it takes.
    #[test]
    fn build_never_aborts(tree in module_tree()) {
        let (spec, _diags) = build(&tree);
        prop_assert_eq!(&spec.name, tree.argument.as_ref().unwrap());
    }
}

/// Trees rooted in real YANG keywords exercise the per-keyword builders.
fn yangish_statement(depth: u32) -> BoxedStrategy<RawStatement> {
    let kw = prop_oneof![
        Just("leaf".to_string()),
        Just("leaf-list".to_string()),
        Just("container".to_string()),
        Just("list".to_string()),
        Just("type".to_string()),
        Just("key".to_string()),
        Just("config".to_string()),
        Just("typedef".to_string()),
        Just("grouping".to_string()),
        Just("uses".to_string()),
        Just("augment".to_string()),
        Just("choice".to_string()),
        Just("case".to_string()),
        Just("rpc".to_string()),
        Just("input".to_string()),
        Just("output".to_string()),
        Just("notification".to_string()),
        Just("extension".to_string()),
        Just("argument".to_string()),
        Just("import".to_string()),
        Just("include".to_string()),
        Just("revision".to_string()),
        Just("description".to_string()),
        Just("range".to_string()),
        Just("length".to_string()),
        Just("pattern".to_string()),
        Just("path".to_string()),
        Just("must".to_string()),
        Just("unique".to_string()),
        Just("presence".to_string()),
        Just("min-elements".to_string()),
        Just("namespace".to_string()),
        Just("prefix".to_string()),
        Just("belongs-to".to_string()),
        Just("ext:mark".to_string()),
        "[a-z]{1,6}",
    ];
    let arg = proptest::option::of(prop_oneof![
        "[a-z0-9 ./:_-]{0,10}",
        Just("1 .. max".to_string()),
        Just("true".to_string()),
        Just("false".to_string()),
        Just("0 .. 300".to_string()),
    ]);
    let leaf = (kw.clone(), arg.clone()).prop_map(|(keyword, argument)| RawStatement {
        keyword,
        argument,
        children: Vec::new(),
        span: SourceSpan::point("gen", 1, 1),
    });
    leaf.prop_recursive(depth, 32, 5, move |inner| {
        (kw.clone(), arg.clone(), proptest::collection::vec(inner, 0..5)).prop_map(
            |(keyword, argument, children)| RawStatement {
                keyword,
                argument,
                children,
                span: SourceSpan::point("gen", 1, 1),
            },
        )
    })
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]
    #[test]
    fn build_is_total_over_yang_shaped_trees(
        name in "[a-z][a-z0-9-]{0,6}",
        children in proptest::collection::vec(yangish_statement(3), 0..6),
    ) {
        let tree = RawStatement {
            keyword: "module".to_string(),
            argument: Some(name),
            children,
            span: SourceSpan::point("gen", 1, 1),
        };
        let (spec, diags) = build(&tree);
        // order of surviving bodies follows source order
        prop_assert!(spec.bodies.len() <= tree.children.len());
        let _ = diags;
    }
}
