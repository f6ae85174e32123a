//! Source positions for tokens, statements and diagnostics.

use std::fmt;
use std::sync::Arc;

/// A contiguous region of one source file.
///
/// Lines and columns are 1-based; the end position is inclusive (the
/// position of the last character belonging to the region).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    /// File identifier, normally the path the file was read from.
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(
        file: Arc<str>,
        start_line: u32,
        start_col: u32,
        end_line: u32,
        end_col: u32,
    ) -> Self {
        debug_assert!(start_line >= 1 && start_col >= 1);
        debug_assert!((start_line, start_col) <= (end_line, end_col));
        SourceSpan {
            file,
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    /// A zero-width span, used for positions like end-of-file.
    pub fn point(file: &str, line: u32, col: u32) -> Self {
        SourceSpan {
            file: Arc::from(file),
            start_line: line,
            start_col: col,
            end_line: line,
            end_col: col,
        }
    }

    /// The smallest span covering both `self` and `other`.
    ///
    /// Both spans must come from the same file.
    pub fn cover(&self, other: &SourceSpan) -> SourceSpan {
        let (start_line, start_col) = (self.start_line, self.start_col)
            .min((other.start_line, other.start_col));
        let (end_line, end_col) = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan {
            file: Arc::clone(&self.file),
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub fn start(&self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }

    pub fn end(&self) -> (u32, u32) {
        (self.end_line, self.end_col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}
