use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Identifier, with an index block when written `a_{1,2}`.
    Ident(String, Option<Vec<u32>>),
    Num(u32),
    Quote,
    Dot,
    Plus,
    Pipe,
    PipeT,
    Interleave,
    IntChoice,
    ExtChoice,
    LSync,
    RSync,
    RestrictOp,
    Backslash,
    BackslashT,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LRename,
    RRename,
    RenameArrow,
    Comma,
    Hash,
    LParen,
    RParen,
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let at = |i: usize, off: usize| chars.get(i + off).copied();

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && at(i, 1) == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        let (tok, len) = if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if word.ends_with('_') && at(j, 0) == Some('{') {
                let mut k = j + 1;
                let mut idx = Vec::new();
                loop {
                    let ds = k;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    if ds == k {
                        return Err(ParseError::new(
                            "expected an index in `{...}` block",
                            SourceSpan { line, column: col + (k - i), length: 1 },
                        ));
                    }
                    let n: String = chars[ds..k].iter().collect();
                    idx.push(n.parse().map_err(|_| {
                        ParseError::new("index too large", SourceSpan { line, column: col + (ds - i), length: k - ds })
                    })?);
                    match at(k, 0) {
                        Some(',') => k += 1,
                        Some('}') => {
                            k += 1;
                            break;
                        }
                        _ => {
                            return Err(ParseError::new(
                                "unterminated index block",
                                SourceSpan { line, column: col + (k - i), length: 1 },
                            ))
                        }
                    }
                }
                let stem = word.trim_end_matches('_').to_string();
                (Tok::Ident(stem, Some(idx)), k - i)
            } else {
                (Tok::Ident(word, None), j - i)
            }
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let n: String = chars[i..j].iter().collect();
            let v = n
                .parse()
                .map_err(|_| ParseError::new("number too large", SourceSpan { line, column: col, length: j - i }))?;
            (Tok::Num(v), j - i)
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let three: String = chars[i..(i + 3).min(chars.len())].iter().collect();
            match c {
                '|' if three == "|~|" => (Tok::IntChoice, 3),
                '|' if three == "|||" => (Tok::Interleave, 3),
                '|' if three == "|_T" && !at(i, 3).is_some_and(|n| n.is_ascii_alphanumeric() || n == '_') => {
                    (Tok::PipeT, 3)
                }
                '|' if two == "|]" => (Tok::RSync, 2),
                '|' if two == "|>" => (Tok::RestrictOp, 2),
                '|' => (Tok::Pipe, 1),
                '\\' if three == "\\_T" => (Tok::BackslashT, 3),
                '\\' => (Tok::Backslash, 1),
                '[' if two == "[|" => (Tok::LSync, 2),
                '[' if two == "[]" => (Tok::ExtChoice, 2),
                '[' if two == "[[" => (Tok::LRename, 2),
                '[' => (Tok::LBracket, 1),
                ']' if two == "]]" => (Tok::RRename, 2),
                ']' => (Tok::RBracket, 1),
                '-' if two == "->" => (Tok::Arrow, 2),
                '<' if two == "<-" => (Tok::RenameArrow, 2),
                '\'' => (Tok::Quote, 1),
                '.' => (Tok::Dot, 1),
                '+' => (Tok::Plus, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ',' => (Tok::Comma, 1),
                '#' => (Tok::Hash, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                other => {
                    return Err(ParseError::new(
                        format!("unexpected character `{other}`"),
                        SourceSpan { line, column: col, length: 1 },
                    ))
                }
            }
        };
        out.push(Token { tok, span: SourceSpan { line, column: start_col, length: len } });
        i += len;
        col += len;
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan { line, column: col, length: 0 } });
    Ok(out)
}
