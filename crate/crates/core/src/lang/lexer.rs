use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// Lowercase-initial identifier.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    /// Unsigned decimal literal; sign is handled by the parser.
    Number(f64),
    True,
    /// `.B`
    Believes,
    Plus,
    Minus,
    Bang,
    Colon,
    Arrow,
    LBrace,
    RBrace,
    /// `adjacent` is true when no whitespace separates the parenthesis
    /// from the preceding token, which is what distinguishes
    /// `f(x)` from `f (perform)`.
    LParen { adjacent: bool },
    RParen,
    Comma,
    Semi,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::True => "`True`".into(),
            Tok::Believes => "`.B`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen { .. } => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let mut spaced = true;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            spaced = true;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            spaced = true;
            continue;
        }

        let (start_line, start_col) = (line, col);
        let err = |expected: &[&str], found: String| SyntaxError {
            line: start_line,
            column: start_col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        };

        let tok = match c {
            '+' => {
                bump!();
                Tok::Plus
            }
            '-' => {
                bump!();
                Tok::Minus
            }
            '!' => {
                bump!();
                Tok::Bang
            }
            ':' => {
                bump!();
                Tok::Colon
            }
            '{' => {
                bump!();
                Tok::LBrace
            }
            '}' => {
                bump!();
                Tok::RBrace
            }
            '(' => {
                bump!();
                Tok::LParen { adjacent: !spaced }
            }
            ')' => {
                bump!();
                Tok::RParen
            }
            ',' => {
                bump!();
                Tok::Comma
            }
            ';' => {
                bump!();
                Tok::Semi
            }
            '<' => {
                bump!();
                if chars.get(i) == Some(&'-') {
                    bump!();
                    Tok::Arrow
                } else {
                    return Err(err(&["`<-`"], "`<`".into()));
                }
            }
            '.' => {
                bump!();
                let next_is_ident = chars
                    .get(i + 1)
                    .is_some_and(|c| c.is_alphanumeric() || *c == '_');
                if chars.get(i) == Some(&'B') && !next_is_ident {
                    bump!();
                    Tok::Believes
                } else {
                    return Err(err(&["`.B`"], "`.`".into()));
                }
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    text.push(chars[i]);
                    bump!();
                }
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    text.push('.');
                    bump!();
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        text.push(chars[i]);
                        bump!();
                    }
                }
                if matches!(chars.get(i), Some('e' | 'E')) {
                    let sign = matches!(chars.get(i + 1), Some('+' | '-'));
                    let digit_at = if sign { i + 2 } else { i + 1 };
                    if chars.get(digit_at).is_some_and(|d| d.is_ascii_digit()) {
                        text.push('e');
                        bump!();
                        if sign {
                            text.push(chars[i]);
                            bump!();
                        }
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            text.push(chars[i]);
                            bump!();
                        }
                    }
                }
                match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => Tok::Number(v),
                    _ => return Err(err(&["finite number"], format!("`{text}`"))),
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut text = String::new();
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    text.push(chars[i]);
                    bump!();
                }
                if text == "True" {
                    Tok::True
                } else if c.is_uppercase() || c == '_' {
                    Tok::Var(text)
                } else {
                    Tok::Ident(text)
                }
            }
            other => return Err(err(&["token"], format!("`{other}`"))),
        };
        out.push(Token {
            tok,
            line: start_line,
            column: start_col,
        });
        spaced = false;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn paren_adjacency() {
        assert_eq!(
            kinds("f(x) (perform)"),
            vec![
                Tok::Ident("f".into()),
                Tok::LParen { adjacent: true },
                Tok::Ident("x".into()),
                Tok::RParen,
                Tok::LParen { adjacent: false },
                Tok::Ident("perform".into()),
                Tok::RParen,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn numbers_and_comments() {
        assert_eq!(
            kinds("1.5e-3 // trailing\n42 7.29e+1"),
            vec![Tok::Number(1.5e-3), Tok::Number(42.0), Tok::Number(72.9), Tok::Eof]
        );
    }

    #[test]
    fn operators() {
        assert_eq!(
            kinds(".B True <- :"),
            vec![Tok::Believes, Tok::True, Tok::Arrow, Tok::Colon, Tok::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  b").unwrap();
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
    }

    #[test]
    fn stray_character() {
        let e = tokenize("a # b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
    }
}
