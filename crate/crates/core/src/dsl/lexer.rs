use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident { text: String, quoted: bool },
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Colon,
    Eq,
    Dot,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident { text, quoted: true } => format!("\"{text}\""),
            Tok::Ident { text, .. } => format!("`{text}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '$' | '-')
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                let mut width = 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(ParseError::new(l0, c0, "unterminated quoted name"));
                        }
                        Some('"') => {
                            width += 1;
                            break;
                        }
                        Some('\\') => match chars.get(j + 1) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                j += 2;
                                width += 2;
                            }
                            _ => {
                                return Err(ParseError::new(
                                    line,
                                    col + width,
                                    "unknown escape; only \\\" and \\\\ are allowed",
                                ));
                            }
                        },
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                            width += 1;
                        }
                    }
                }
                push(
                    Tok::Ident {
                        text: s,
                        quoted: true,
                    },
                    width,
                    &mut i,
                    &mut col,
                );
            }
            c if is_ident_char(c) => {
                let mut j = i;
                while j < chars.len()
                    && is_ident_char(chars[j])
                    && !(chars[j] == '-' && chars.get(j + 1) == Some(&'>'))
                {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                push(
                    Tok::Ident {
                        text,
                        quoted: false,
                    },
                    j - i,
                    &mut i,
                    &mut col,
                );
            }
            other => {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}
