use crate::error::{DendroError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Str(String),
    Punct(char),
    Arrow,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn err(self, msg: impl Into<String>) -> DendroError {
        DendroError::Parse { line: self.line, col: self.col, msg: msg.into() }
    }
}

pub fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            advance(&mut i, &mut line, &mut col);
            advance(&mut i, &mut line, &mut col);
            out.push((Tok::Arrow, pos));
        } else if "{}[]();:,=".contains(c) {
            advance(&mut i, &mut line, &mut col);
            out.push((Tok::Punct(c), pos));
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(pos.err("unterminated string")),
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col);
                        break;
                    }
                    Some('\\') => {
                        advance(&mut i, &mut line, &mut col);
                        match chars.get(i) {
                            Some(&e @ ('"' | '\\')) => s.push(e),
                            _ => return Err(Pos { line, col }.err("unknown escape")),
                        }
                        advance(&mut i, &mut line, &mut col);
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut col);
                    }
                }
            }
            out.push((Tok::Str(s), pos));
        } else if is_word_char(c) {
            let mut s = String::new();
            while i < chars.len() && is_word_char(chars[i]) {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut col);
            }
            out.push((Tok::Word(s), pos));
        } else {
            return Err(pos.err(format!("unexpected character {c:?}")));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// A name as it should be written: bare when it is a single word, quoted otherwise.
pub fn quote(name: &str) -> String {
    if !name.is_empty() && name.chars().all(is_word_char) {
        name.to_string()
    } else {
        let mut s = String::from("\"");
        for c in name.chars() {
            if c == '"' || c == '\\' {
                s.push('\\');
            }
            s.push(c);
        }
        s.push('"');
        s
    }
}
