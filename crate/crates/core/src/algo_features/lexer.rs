//! Tokenizer for the Rust subset used by the portfolio sources.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Lifetime,
    Int,
    Float,
    Str,
    Char,
    Punct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: usize,
    pub col: usize,
    /// Last line covered by the token (differs from `line` for multi-line strings).
    pub end_line: usize,
    /// The next character follows immediately, with no whitespace between.
    pub joint: bool,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && matches!(self.kind, TokenKind::Punct | TokenKind::Ident)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

// `>` is always emitted alone so that nested generics close one at a time;
// the parser re-joins `>>`, `>=` and `>>=` in expressions.
const PUNCTS: [&str; 39] = [
    "...", "..=", "<<=", "::", "->", "=>", "==", "!=", "<=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "^=", "&=",
    "|=", "<<", "..", "+", "-", "*", "/", "%", "^", "!", "&", "|", "=", "<", "@", ".", ",", ";", ":", "#", "?",
];
const SINGLE: &str = "$~()[]{}>";

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut lexer = Lexer {
        chars,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        lexer.skip_trivia()?;
        if lexer.pos >= lexer.chars.len() {
            break;
        }
        let mut token = lexer.next_token()?;
        token.joint = lexer.peek(0).is_some_and(|c| !c.is_whitespace());
        out.push(token);
    }
    Ok(out)
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn error(&self, msg: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while self.peek(0).is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    let mut depth = 1;
                    while depth > 0 {
                        match (self.peek(0), self.peek(1)) {
                            (None, _) => {
                                return Err(LexError {
                                    line,
                                    col,
                                    msg: "unterminated block comment".into(),
                                })
                            }
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                depth -= 1;
                            }
                            (Some('/'), Some('*')) => {
                                self.bump();
                                self.bump();
                                depth += 1;
                            }
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        let (line, col, start) = (self.line, self.col, self.pos);
        let c = self.peek(0).expect("caller checked for input");
        let kind = if c == 'r' && matches!((self.peek(1), self.peek(2)), (Some('"'), _) | (Some('#'), Some('"' | '#'))) {
            self.raw_string()?;
            TokenKind::Str
        } else if c == 'b' && self.peek(1) == Some('"') {
            self.bump();
            self.string()?;
            TokenKind::Str
        } else if c == 'b' && self.peek(1) == Some('\'') {
            self.bump();
            self.char_literal()?;
            TokenKind::Char
        } else if c.is_alphabetic() || c == '_' {
            while self.peek(0).is_some_and(|c| c.is_alphanumeric() || c == '_') {
                self.bump();
            }
            TokenKind::Ident
        } else if c.is_ascii_digit() {
            self.number()
        } else if c == '"' {
            self.string()?;
            TokenKind::Str
        } else if c == '\'' {
            self.quote()?
        } else if let Some(p) = PUNCTS.iter().find(|p| self.starts_with(p)) {
            for _ in 0..p.len() {
                self.bump();
            }
            TokenKind::Punct
        } else if SINGLE.contains(c) {
            self.bump();
            TokenKind::Punct
        } else {
            return Err(self.error(format!("unexpected character `{c}`")));
        };
        Ok(Token {
            kind,
            text: self.chars[start..self.pos].iter().collect(),
            line,
            col,
            end_line: self.line,
            joint: false,
        })
    }

    fn starts_with(&self, p: &str) -> bool {
        p.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    fn number(&mut self) -> TokenKind {
        let mut kind = TokenKind::Int;
        if self.peek(0) == Some('0') && matches!(self.peek(1), Some('x' | 'o' | 'b')) {
            self.bump();
            self.bump();
            while self.peek(0).is_some_and(|c| c.is_ascii_hexdigit() || c == '_') {
                self.bump();
            }
        } else {
            self.digits();
            // `1.0` is a float; `1..n` and `x.0.method()` are not
            if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
                kind = TokenKind::Float;
                self.bump();
                self.digits();
            }
            if matches!(self.peek(0), Some('e' | 'E'))
                && (self.peek(1).is_some_and(|c| c.is_ascii_digit())
                    || (matches!(self.peek(1), Some('+' | '-')) && self.peek(2).is_some_and(|c| c.is_ascii_digit())))
            {
                kind = TokenKind::Float;
                self.bump();
                if matches!(self.peek(0), Some('+' | '-')) {
                    self.bump();
                }
                self.digits();
            }
        }
        // type suffix such as `u64` or `f32`
        if self.peek(0).is_some_and(|c| c.is_alphabetic()) {
            if matches!(self.peek(0), Some('f')) {
                kind = TokenKind::Float;
            }
            while self.peek(0).is_some_and(|c| c.is_alphanumeric() || c == '_') {
                self.bump();
            }
        }
        kind
    }

    fn digits(&mut self) {
        while self.peek(0).is_some_and(|c| c.is_ascii_digit() || c == '_') {
            self.bump();
        }
    }

    fn string(&mut self) -> Result<(), LexError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        loop {
            match self.peek(0) {
                None => {
                    return Err(LexError {
                        line,
                        col,
                        msg: "unterminated string".into(),
                    })
                }
                Some('\\') => {
                    self.bump();
                    if self.peek(0).is_some() {
                        self.bump();
                    }
                }
                Some('"') => {
                    self.bump();
                    return Ok(());
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn raw_string(&mut self) -> Result<(), LexError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        let mut hashes = 0;
        while self.peek(0) == Some('#') {
            self.bump();
            hashes += 1;
        }
        if self.peek(0) != Some('"') {
            return Err(self.error("malformed raw string"));
        }
        self.bump();
        loop {
            match self.peek(0) {
                None => {
                    return Err(LexError {
                        line,
                        col,
                        msg: "unterminated raw string".into(),
                    })
                }
                Some('"') if (1..=hashes).all(|i| self.peek(i) == Some('#')) => {
                    for _ in 0..=hashes {
                        self.bump();
                    }
                    return Ok(());
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn char_literal(&mut self) -> Result<(), LexError> {
        self.bump();
        if self.peek(0) == Some('\\') {
            self.bump();
        }
        if self.peek(0).is_some() {
            self.bump();
        }
        while self.peek(0).is_some_and(|c| c != '\'') {
            // escapes like '\u{1F600}'
            self.bump();
        }
        if self.peek(0) != Some('\'') {
            return Err(self.error("unterminated character literal"));
        }
        self.bump();
        Ok(())
    }

    /// Character literal or lifetime.
    fn quote(&mut self) -> Result<TokenKind, LexError> {
        let is_char = match (self.peek(1), self.peek(2)) {
            (Some('\\'), _) => true,
            (Some(_), Some('\'')) => true,
            _ => false,
        };
        if is_char {
            self.char_literal()?;
            return Ok(TokenKind::Char);
        }
        self.bump();
        if !self.peek(0).is_some_and(|c| c.is_alphabetic() || c == '_') {
            return Err(self.error("malformed lifetime"));
        }
        while self.peek(0).is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        Ok(TokenKind::Lifetime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        tokenize(src).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn numbers_ranges_and_tuple_fields() {
        assert_eq!(texts("0..n"), ["0", "..", "n"]);
        assert_eq!(texts("e.2 + 1.5e-3"), ["e", ".", "2", "+", "1.5e-3"]);
        assert_eq!(texts("-0.1..0.1"), ["-", "0.1", "..", "0.1"]);
        assert_eq!(texts("1u64 2f64"), ["1u64", "2f64"]);
        let kinds: Vec<TokenKind> = tokenize("3 3.0 1e9").unwrap().iter().map(|t| t.kind).collect();
        assert_eq!(kinds, [TokenKind::Int, TokenKind::Float, TokenKind::Float]);
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(texts("//! doc\n/// item\na /* b /* nested */ */ c // tail"), ["a", "c"]);
    }

    #[test]
    fn closing_angles_stay_separate() {
        assert_eq!(texts("Vec<Vec<f64>>"), ["Vec", "<", "Vec", "<", "f64", ">", ">"]);
        let toks = tokenize("a >= b").unwrap();
        assert!(toks[1].joint && toks[1].text == ">" && toks[2].text == "=");
    }

    #[test]
    fn strings_chars_and_lifetimes() {
        let toks = tokenize("\"a\\\"b\" 'x' '\\n' 'a r#\"q\"#").unwrap();
        let kinds: Vec<TokenKind> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            [TokenKind::Str, TokenKind::Char, TokenKind::Char, TokenKind::Lifetime, TokenKind::Str]
        );
    }

    #[test]
    fn multi_line_string_spans_lines() {
        let toks = tokenize("x\n\"a\nb\"").unwrap();
        assert_eq!((toks[1].line, toks[1].end_line), (2, 3));
    }

    #[test]
    fn errors_carry_position() {
        let err = tokenize("a\n  \"open").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
        assert!(tokenize("a ` b").is_err());
    }
}
