use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `\name`
    Keyword(String),
    Hash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Eq,
    Arrow,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Keyword(s) => format!("`\\{s}`"),
            Tok::Hash => "`#`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
    /// First token on its line.
    pub line_start: bool,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn ident_continue(c: char) -> bool {
    ident_start(c) || c == '\'' || c == '-'
}

/// `name'17` is the shape of generated fresh names.
pub(crate) fn is_reserved_ident(s: &str) -> bool {
    match s.rfind('\'') {
        Some(i) => {
            let tail = &s[i + 1..];
            !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

/// Split `text` into tokens. Lexical errors are reported and the offending
/// character skipped, so the result always ends with `Eof`.
pub(crate) fn lex(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut line_start = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            line_start = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        let single = |t: Tok| Some((t, 1));
        let simple = match c {
            '#' => single(Tok::Hash),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            ',' => single(Tok::Comma),
            ':' => single(Tok::Colon),
            '=' => single(Tok::Eq),
            '-' if chars.get(i + 1) == Some(&'>') => Some((Tok::Arrow, 2)),
            _ => None,
        };
        if let Some((tok, len)) = simple {
            out.push(Token { tok, span: Span::new(line, start_col, len), line_start });
            line_start = false;
            i += len;
            col += len;
            continue;
        }
        if c == '\\' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_alphabetic() {
                j += 1;
            }
            let len = j - i;
            if len == 1 {
                diags.push(Diagnostic::error(
                    Span::new(line, start_col, 1),
                    "unexpected-character",
                    "`\\` must be followed by a connective name",
                ));
            } else {
                let name: String = chars[i + 1..j].iter().collect();
                out.push(Token { tok: Tok::Keyword(name), span: Span::new(line, start_col, len), line_start });
                line_start = false;
            }
            col += len;
            i = j;
            continue;
        }
        if ident_start(c) {
            let mut j = i + 1;
            while j < chars.len() && ident_continue(chars[j]) {
                if chars[j] == '-' && chars.get(j + 1) == Some(&'>') {
                    break;
                }
                j += 1;
            }
            let len = j - i;
            let name: String = chars[i..j].iter().collect();
            let span = Span::new(line, start_col, len);
            if is_reserved_ident(&name) {
                diags.push(Diagnostic::error(
                    span,
                    "reserved-identifier",
                    format!(
                        "identifier `{name}` ends in `'` followed by digits, which is reserved for generated names"
                    ),
                ));
            }
            out.push(Token { tok: Tok::Ident(name), span, line_start });
            line_start = false;
            col += len;
            i = j;
            continue;
        }
        diags.push(Diagnostic::error(
            Span::new(line, start_col, 1),
            "unexpected-character",
            format!("unexpected character {c:?}"),
        ));
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col, 0), line_start: true });
    out
}
