//! Lexical analysis: YANG source text to a token stream.
//!
//! Comments (`//` and `/* */`) are skipped. Double-quoted strings decode the
//! escapes `\n \t \" \\`; single-quoted strings are literal. Strings joined
//! by `+` collapse into a single token. The first lexical error aborts the
//! file.

use crate::diag::{DiagCode, Diagnostic};
use crate::span::SourceSpan;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    PrefixedIdentifier,
    String,
    Number,
    LeftBrace,
    RightBrace,
    Semicolon,
    Plus,
}

/// One lexical token. For `String` tokens `text` holds the decoded content,
/// for everything else the literal source characters.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: SourceSpan,
}

/// Tokenize one source file. Returns every token in order or the first
/// lexical error.
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, Diagnostic> {
    Lexer::new(source, file).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    file: Arc<str>,
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    line: u32,
    col: u32,
}

impl Lexer {
    fn new(source: &str, file: &str) -> Self {
        Lexer {
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            file: Arc::from(file),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Mark {
        Mark {
            pos: self.pos,
            line: self.line,
            col: self.col,
        }
    }

    fn restore(&mut self, m: Mark) {
        self.pos = m.pos;
        self.line = m.line;
        self.col = m.col;
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn span_from(&self, start: (u32, u32), end: (u32, u32)) -> SourceSpan {
        SourceSpan::new(Arc::clone(&self.file), start.0, start.1, end.0, end.1)
    }

    /// Position of the character just consumed.
    fn prev_pos(&self, start: (u32, u32)) -> (u32, u32) {
        if self.col > 1 {
            (self.line, self.col - 1)
        } else if self.line > start.0 {
            // consumed a newline; report the start of the current line
            (self.line, 1)
        } else {
            start
        }
    }

    fn error(&self, code: DiagCode, start: (u32, u32), msg: String) -> Diagnostic {
        Diagnostic::new(code, self.span_from(start, self.here().max(start)), msg)
    }

    fn run(mut self) -> Result<Vec<Token>, Diagnostic> {
        let mut tokens = Vec::new();
        loop {
            self.skip_trivia()?;
            let Some(c) = self.peek() else { break };
            let start = self.here();
            match c {
                '{' | '}' | ';' | '+' => {
                    self.bump();
                    let kind = match c {
                        '{' => TokenKind::LeftBrace,
                        '}' => TokenKind::RightBrace,
                        ';' => TokenKind::Semicolon,
                        _ => TokenKind::Plus,
                    };
                    tokens.push(Token {
                        kind,
                        text: c.to_string(),
                        span: self.span_from(start, start),
                    });
                }
                '"' | '\'' => {
                    let token = self.lex_string_sequence(start)?;
                    tokens.push(token);
                }
                '(' => {
                    let token = self.lex_paren_number(start)?;
                    tokens.push(token);
                }
                _ if is_word_char(c) => {
                    let token = self.lex_word(start)?;
                    tokens.push(token);
                }
                _ => {
                    return Err(self.error(
                        DiagCode::IllegalCharacter,
                        start,
                        format!("illegal character `{}`", c.escape_default()),
                    ));
                }
            }
        }
        Ok(tokens)
    }

    fn skip_trivia(&mut self) -> Result<(), Diagnostic> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.here();
                    self.bump();
                    self.bump();
                    let mut closed = false;
                    while let Some(c) = self.bump() {
                        if c == '*' && self.peek() == Some('/') {
                            self.bump();
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        return Err(self.error(
                            DiagCode::UnterminatedComment,
                            start,
                            "block comment is never closed".to_string(),
                        ));
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    /// One quoted string, or several joined with `+`, as a single token.
    fn lex_string_sequence(&mut self, start: (u32, u32)) -> Result<Token, Diagnostic> {
        let mut text = self.lex_one_string()?;
        let mut end = self.prev_pos(start);
        loop {
            let before = self.mark();
            self.skip_trivia()?;
            if self.peek() == Some('+') {
                self.bump();
                self.skip_trivia()?;
                if matches!(self.peek(), Some('"') | Some('\'')) {
                    text.push_str(&self.lex_one_string()?);
                    end = self.prev_pos(start);
                    continue;
                }
            }
            self.restore(before);
            break;
        }
        Ok(Token {
            kind: TokenKind::String,
            text,
            span: self.span_from(start, end),
        })
    }

    fn lex_one_string(&mut self) -> Result<String, Diagnostic> {
        let start = self.here();
        let quote = self.bump().expect("caller checked quote");
        let mut text = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(self.error(
                        DiagCode::UnterminatedString,
                        start,
                        "string is never closed".to_string(),
                    ));
                }
                Some(c) if c == quote => return Ok(text),
                Some('\\') if quote == '"' => match self.bump() {
                    Some('n') => text.push('\n'),
                    Some('t') => text.push('\t'),
                    Some('"') => text.push('"'),
                    Some('\\') => text.push('\\'),
                    Some(other) => {
                        text.push('\\');
                        text.push(other);
                    }
                    None => {
                        return Err(self.error(
                            DiagCode::UnterminatedString,
                            start,
                            "string is never closed".to_string(),
                        ));
                    }
                },
                Some(c) => text.push(c),
            }
        }
    }

    /// `(32)`-style width markers, normalized to `(digits)`.
    fn lex_paren_number(&mut self, start: (u32, u32)) -> Result<Token, Diagnostic> {
        self.bump(); // (
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        let mut digits = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.bump().unwrap());
        }
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        if digits.is_empty() || self.peek() != Some(')') {
            return Err(self.error(
                DiagCode::IllegalCharacter,
                start,
                "expected `(digits)`".to_string(),
            ));
        }
        self.bump(); // )
        let end = self.prev_pos(start);
        Ok(Token {
            kind: TokenKind::Number,
            text: format!("({})", digits),
            span: self.span_from(start, end),
        })
    }

    fn lex_word(&mut self, start: (u32, u32)) -> Result<Token, Diagnostic> {
        let mut word = String::new();
        while matches!(self.peek(), Some(c) if is_word_char(c)) {
            word.push(self.bump().unwrap());
        }
        let end = self.prev_pos(start);
        let kind = classify_word(&word).ok_or_else(|| {
            self.error(
                DiagCode::IllegalCharacter,
                start,
                format!("cannot read `{}` as an identifier, number or path", word),
            )
        })?;
        Ok(Token {
            kind,
            text: word,
            span: self.span_from(start, end),
        })
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '/')
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn is_prefixed_identifier(s: &str) -> bool {
    match s.split_once(':') {
        Some((p, n)) => is_identifier(p) && is_identifier(n),
        None => false,
    }
}

/// Schema-node paths like `login/user` or `/router:login/user` lex as plain
/// identifiers; each step must be an identifier, prefixed identifier or `..`.
fn is_node_path(s: &str) -> bool {
    let body = s.strip_prefix('/').unwrap_or(s);
    if body.is_empty() {
        return false;
    }
    body.split('/').all(|step| {
        step == ".." || is_identifier(step) || is_prefixed_identifier(step)
    })
}

fn classify_word(word: &str) -> Option<TokenKind> {
    let starts_numeric = word.starts_with(|c: char| c.is_ascii_digit())
        || (word.starts_with('-')
            && word[1..].starts_with(|c: char| c.is_ascii_digit()));
    if is_identifier(word) {
        Some(TokenKind::Identifier)
    } else if is_prefixed_identifier(word) {
        Some(TokenKind::PrefixedIdentifier)
    } else if starts_numeric {
        Some(TokenKind::Number)
    } else if is_node_path(word) {
        Some(TokenKind::Identifier)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src, "t.yang").unwrap().iter().map(|t| t.kind).collect()
    }

    fn texts(src: &str) -> Vec<String> {
        tokenize(src, "t.yang")
            .unwrap()
            .into_iter()
            .map(|t| t.text)
            .collect()
    }

    #[test]
    fn prefix_statement() {
        let toks = tokenize("prefix router;", "t.yang").unwrap();
        assert_eq!(
            toks.iter().map(|t| t.kind).collect::<Vec<_>>(),
            vec![TokenKind::Identifier, TokenKind::Identifier, TokenKind::Semicolon]
        );
        assert_eq!(toks[0].text, "prefix");
        assert_eq!(toks[1].text, "router");
    }

    #[test]
    fn empty_input_gives_empty_sequence() {
        assert!(tokenize("", "t.yang").unwrap().is_empty());
    }

    #[test]
    fn string_concatenation_joins_into_one_token() {
        // oracle: "ab" + "cd" joined by hand is "abcd"
        let expected = format!("{}{}", "ab", "cd");
        let toks = tokenize("\"ab\" + \"cd\"", "t.yang").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].kind, TokenKind::String);
        assert_eq!(toks[0].text, expected);
    }

    #[test]
    fn concatenation_mixes_quote_styles_and_comments() {
        let toks = tokenize("'a' /* x */ + // y\n \"b\\n\"", "t.yang").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].text, "ab\n");
    }

    #[test]
    fn lone_plus_is_a_plus_token() {
        assert_eq!(kinds("a + b"), vec![
            TokenKind::Identifier,
            TokenKind::Plus,
            TokenKind::Identifier
        ]);
    }

    #[test]
    fn double_quote_decodes_escapes_single_quote_is_literal() {
        let toks = tokenize(r#""a\tb\\c\"d" 'e\tf'"#, "t.yang").unwrap();
        assert_eq!(toks[0].text, "a\tb\\c\"d");
        assert_eq!(toks[1].text, r"e\tf");
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(texts("// line\nfoo /* block\nstill */ bar"), vec!["foo", "bar"]);
    }

    #[test]
    fn numbers_dates_and_paths() {
        assert_eq!(kinds("10 2008-01-01 -5"), vec![TokenKind::Number; 3]);
        assert_eq!(kinds("login/user"), vec![TokenKind::Identifier]);
        assert_eq!(kinds("yang:counter32"), vec![TokenKind::PrefixedIdentifier]);
        assert_eq!(kinds("/router:login/user"), vec![TokenKind::Identifier]);
        assert_eq!(kinds("../interfaces/index"), vec![TokenKind::Identifier]);
    }

    #[test]
    fn parenthesized_width_is_a_number_token() {
        let toks = tokenize("bits (32)", "t.yang").unwrap();
        assert_eq!(toks[1].kind, TokenKind::Number);
        assert_eq!(toks[1].text, "(32)");
        let toks = tokenize("bits ( 32 )", "t.yang").unwrap();
        assert_eq!(toks[1].text, "(32)");
    }

    #[test]
    fn unterminated_string_is_a_lexical_error() {
        let err = tokenize("leaf \"never closed", "t.yang").unwrap_err();
        assert_eq!(err.code, DiagCode::UnterminatedString);
    }

    #[test]
    fn unterminated_comment_is_a_lexical_error() {
        let err = tokenize("/* open", "t.yang").unwrap_err();
        assert_eq!(err.code, DiagCode::UnterminatedComment);
    }

    #[test]
    fn illegal_character_is_reported_with_position() {
        let err = tokenize("leaf @x;", "t.yang").unwrap_err();
        assert_eq!(err.code, DiagCode::IllegalCharacter);
        assert_eq!(err.span.start_line, 1);
        assert_eq!(err.span.start_col, 6);
    }

    #[test]
    fn spans_are_one_based_and_monotonic() {
        let toks = tokenize("module m {\n  prefix p;\n}", "t.yang").unwrap();
        let mut prev = (0u32, 0u32);
        for t in &toks {
            assert!(t.span.start_line >= 1 && t.span.start_col >= 1);
            assert!(t.span.start() > prev, "token {:?} overlaps previous", t);
            assert!(t.span.start() <= t.span.end());
            prev = t.span.end();
        }
    }
}
