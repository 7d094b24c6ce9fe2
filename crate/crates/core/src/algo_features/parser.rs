//! Recursive-descent parser producing a generic syntax tree.
//!
//! Interior nodes carry a [`NodeKind`]; leaves carry the operator and operand
//! tokens. Grouping punctuation (parentheses, brackets, braces, generic angle
//! brackets, commas, semicolons, colons and path separators) does not appear
//! in the tree. Attributes appear as childless [`NodeKind::Attr`] nodes.

use super::lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    File,
    Attr,
    Visibility,
    Use,
    UseTree,
    Fn,
    Param,
    Struct,
    Enum,
    Variant,
    Field,
    Impl,
    Trait,
    Const,
    Static,
    TypeAlias,
    Mod,
    MacroItem,
    Generics,
    GenericParam,
    Where,
    Type,
    Block,
    Let,
    ExprStmt,
    If,
    Match,
    Arm,
    Guard,
    For,
    While,
    Loop,
    Closure,
    Call,
    MethodCall,
    FieldAccess,
    Index,
    Binary,
    Unary,
    Cast,
    Try,
    Range,
    Assign,
    Path,
    Literal,
    Tuple,
    Array,
    StructLit,
    FieldInit,
    Macro,
    Return,
    Break,
    Continue,
    Paren,
    Pattern,
    Leaf,
}

impl NodeKind {
    /// Top-level and nested item declarations.
    pub fn is_item(self) -> bool {
        matches!(
            self,
            NodeKind::Use
                | NodeKind::Fn
                | NodeKind::Struct
                | NodeKind::Enum
                | NodeKind::Impl
                | NodeKind::Trait
                | NodeKind::Const
                | NodeKind::Static
                | NodeKind::TypeAlias
                | NodeKind::Mod
                | NodeKind::MacroItem
        )
    }

    pub fn is_statement(self) -> bool {
        matches!(self, NodeKind::Let | NodeKind::ExprStmt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafClass {
    Ident,
    Keyword,
    Literal,
    Symbol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub text: String,
    pub class: LeafClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxNode {
    pub kind: NodeKind,
    pub leaf: Option<Leaf>,
    pub children: Vec<SyntaxNode>,
}

impl SyntaxNode {
    fn new(kind: NodeKind, children: Vec<SyntaxNode>) -> Self {
        SyntaxNode {
            kind,
            leaf: None,
            children,
        }
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&SyntaxNode, usize)) {
        fn go(node: &SyntaxNode, depth: usize, visit: &mut impl FnMut(&SyntaxNode, usize)) {
            visit(node, depth);
            for child in &node.children {
                go(child, depth + 1, visit);
            }
        }
        go(self, 0, visit)
    }

    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        fn go<'a>(node: &'a SyntaxNode, out: &mut Vec<&'a Leaf>) {
            if let Some(leaf) = &node.leaf {
                out.push(leaf);
            }
            for child in &node.children {
                go(child, out);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        matches!(&self.leaf, Some(l) if l.class == LeafClass::Keyword && l.text == text)
    }

    pub fn is_symbol(&self, text: &str) -> bool {
        matches!(&self.leaf, Some(l) if l.class == LeafClass::Symbol && l.text == text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

type PResult<T> = Result<T, ParseError>;

pub const KEYWORDS: &[&str] = &[
    "as", "async", "await", "break", "const", "continue", "crate", "dyn", "else", "enum", "extern", "false", "fn", "for",
    "if", "impl", "in", "let", "loop", "match", "mod", "move", "mut", "pub", "ref", "return", "self", "Self", "static",
    "struct", "super", "trait", "true", "type", "unsafe", "use", "where", "while",
];

pub fn parse_file(src: &str) -> PResult<SyntaxNode> {
    let tokens = tokenize(src).map_err(|e| ParseError {
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    let mut p = Parser { toks: tokens, pos: 0 };
    let mut items = Vec::new();
    while !p.done() {
        if p.at("#") && p.nth_is(1, "!") {
            items.push(p.attribute()?);
            continue;
        }
        items.push(p.item()?);
    }
    Ok(SyntaxNode::new(NodeKind::File, items))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn is_keyword(text: &str) -> bool {
    KEYWORDS.contains(&text)
}

impl Parser {
    // ---- token helpers ---------------------------------------------------

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn nth(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn nth_is(&self, n: usize, text: &str) -> bool {
        self.nth(n).is_some_and(|t| t.is(text))
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek().is_some_and(|t| t.kind == kind)
    }

    /// Identifier that is not a reserved word.
    fn at_name(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Ident && !is_keyword(&t.text))
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (line, col) = match self.peek().or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        let found = self.peek().map_or("end of file".to_string(), |t| format!("`{}`", t.text));
        Err(ParseError {
            line,
            col,
            msg: format!("{}, found {found}", msg.into()),
        })
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            self.error(format!("expected `{text}`"))
        }
    }

    /// Consumes the current token as a leaf.
    fn bump_leaf(&mut self) -> SyntaxNode {
        let t = &self.toks[self.pos];
        self.pos += 1;
        let class = match t.kind {
            TokenKind::Ident if is_keyword(&t.text) => LeafClass::Keyword,
            TokenKind::Ident | TokenKind::Lifetime => LeafClass::Ident,
            TokenKind::Int | TokenKind::Float | TokenKind::Str | TokenKind::Char => LeafClass::Literal,
            TokenKind::Punct => LeafClass::Symbol,
        };
        leaf(&t.text, class)
    }

    fn expect_leaf(&mut self, text: &str) -> PResult<SyntaxNode> {
        if self.at(text) {
            Ok(self.bump_leaf())
        } else {
            self.error(format!("expected `{text}`"))
        }
    }

    fn name(&mut self) -> PResult<SyntaxNode> {
        if self.at_name() {
            Ok(self.bump_leaf())
        } else {
            self.error("expected identifier")
        }
    }

    /// Comma-separated list up to (and consuming) `close`.
    fn list(&mut self, close: &str, mut element: impl FnMut(&mut Self) -> PResult<SyntaxNode>) -> PResult<Vec<SyntaxNode>> {
        let mut out = Vec::new();
        while !self.at(close) {
            out.push(element(self)?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(close)?;
        Ok(out)
    }

    /// Skips a balanced token tree, keeping its tokens as leaves.
    fn token_tree(&mut self) -> PResult<Vec<SyntaxNode>> {
        let close = match self.peek().map(|t| t.text.as_str()) {
            Some("(") => ")",
            Some("[") => "]",
            Some("{") => "}",
            _ => return self.error("expected a delimited token tree"),
        };
        self.pos += 1;
        let mut out = Vec::new();
        while !self.at(close) {
            if self.done() {
                return self.error(format!("expected `{close}`"));
            }
            if self.at("(") || self.at("[") || self.at("{") {
                out.extend(self.token_tree()?);
            } else if self.at(")") || self.at("]") || self.at("}") {
                return self.error(format!("expected `{close}`"));
            } else if [",", ";", ":", "::"].iter().any(|d| self.at(d)) {
                self.pos += 1;
            } else {
                out.push(self.bump_leaf());
            }
        }
        self.pos += 1;
        Ok(out)
    }

    // ---- items -----------------------------------------------------------

    fn attribute(&mut self) -> PResult<SyntaxNode> {
        self.expect("#")?;
        self.eat("!");
        if !self.at("[") {
            return self.error("expected `[` after `#`");
        }
        self.token_tree()?;
        Ok(SyntaxNode::new(NodeKind::Attr, vec![]))
    }

    fn outer_attributes(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut out = Vec::new();
        while self.at("#") {
            out.push(self.attribute()?);
        }
        Ok(out)
    }

    fn visibility(&mut self) -> PResult<Option<SyntaxNode>> {
        if !self.at("pub") {
            return Ok(None);
        }
        let mut children = vec![self.bump_leaf()];
        if self.at("(") && (self.nth_is(1, "crate") || self.nth_is(1, "super") || self.nth_is(1, "self") || self.nth_is(1, "in")) {
            self.pos += 1;
            if self.at("in") {
                children.push(self.bump_leaf());
            }
            children.push(self.path(false)?);
            self.expect(")")?;
        }
        Ok(Some(SyntaxNode::new(NodeKind::Visibility, children)))
    }

    fn starts_item(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        match t.text.as_str() {
            "pub" | "use" | "fn" | "struct" | "enum" | "impl" | "trait" | "static" | "mod" | "extern" | "type" => {
                t.kind == TokenKind::Ident
            }
            "const" => !self.nth_is(1, "{") && !self.nth_is(1, "|") && !self.nth_is(1, "move"),
            "async" | "unsafe" => self.nth_is(1, "fn") || self.nth_is(1, "impl") || self.nth_is(1, "trait"),
            "macro_rules" => self.nth_is(1, "!"),
            "#" => true,
            _ => false,
        }
    }

    fn item(&mut self) -> PResult<SyntaxNode> {
        let mut children = self.outer_attributes()?;
        if let Some(vis) = self.visibility()? {
            children.push(vis);
        }
        let kind;
        if self.at("use") {
            kind = NodeKind::Use;
            children.push(self.bump_leaf());
            children.push(self.use_tree()?);
            self.expect(";")?;
        } else if self.at("fn")
            || ((self.at("const") || self.at("async") || self.at("unsafe") || self.at("extern")) && self.fn_ahead())
        {
            kind = NodeKind::Fn;
            children.extend(self.function()?);
        } else if self.at("struct") {
            kind = NodeKind::Struct;
            children.extend(self.structure()?);
        } else if self.at("enum") {
            kind = NodeKind::Enum;
            children.extend(self.enumeration()?);
        } else if self.at("impl") || (self.at("unsafe") && self.nth_is(1, "impl")) {
            kind = NodeKind::Impl;
            children.extend(self.implementation()?);
        } else if self.at("trait") || (self.at("unsafe") && self.nth_is(1, "trait")) {
            kind = NodeKind::Trait;
            children.extend(self.trait_def()?);
        } else if self.at("const") || self.at("static") {
            kind = if self.at("const") { NodeKind::Const } else { NodeKind::Static };
            children.push(self.bump_leaf());
            if self.at("mut") {
                children.push(self.bump_leaf());
            }
            if self.at("_") {
                children.push(self.bump_leaf());
            } else {
                children.push(self.name()?);
            }
            self.expect(":")?;
            children.push(self.ty()?);
            if self.at("=") {
                children.push(self.bump_leaf());
                children.push(self.expr(false)?);
            }
            self.expect(";")?;
        } else if self.at("type") {
            kind = NodeKind::TypeAlias;
            children.push(self.bump_leaf());
            children.push(self.name()?);
            if self.at("<") {
                children.push(self.generic_params()?);
            }
            if self.eat(":") {
                children.extend(self.bounds()?);
            }
            if self.at("=") {
                children.push(self.bump_leaf());
                children.push(self.ty()?);
            }
            self.expect(";")?;
        } else if self.at("mod") {
            kind = NodeKind::Mod;
            children.push(self.bump_leaf());
            children.push(self.name()?);
            if !self.eat(";") {
                self.expect("{")?;
                while !self.at("}") {
                    if self.done() {
                        return self.error("expected `}`");
                    }
                    if self.at("#") && self.nth_is(1, "!") {
                        children.push(self.attribute()?);
                    } else {
                        children.push(self.item()?);
                    }
                }
                self.pos += 1;
            }
        } else if self.at("extern") && self.nth_is(1, "crate") {
            kind = NodeKind::Use;
            children.push(self.bump_leaf());
            children.push(self.bump_leaf());
            children.push(self.name()?);
            if self.at("as") {
                children.push(self.bump_leaf());
                children.push(self.name()?);
            }
            self.expect(";")?;
        } else if self.at_kind(TokenKind::Ident) && self.nth_is(1, "!") {
            kind = NodeKind::MacroItem;
            children.push(self.bump_leaf());
            self.pos += 1;
            if self.at_name() {
                children.push(self.bump_leaf());
            }
            let braced = self.at("{");
            children.extend(self.token_tree()?);
            if !braced {
                self.expect(";")?;
            }
        } else {
            return self.error("expected an item");
        }
        Ok(SyntaxNode::new(kind, children))
    }

    /// Looks past qualifiers (`const`, `async`, `unsafe`, `extern "C"`) for `fn`.
    fn fn_ahead(&self) -> bool {
        let mut n = 0;
        while let Some(t) = self.nth(n) {
            match t.text.as_str() {
                "const" | "async" | "unsafe" | "extern" => n += 1,
                _ if t.kind == TokenKind::Str => n += 1,
                "fn" => return true,
                _ => return false,
            }
        }
        false
    }

    fn use_tree(&mut self) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        self.eat("::");
        loop {
            if self.at("*") {
                children.push(self.bump_leaf());
                break;
            }
            if self.at("{") {
                self.pos += 1;
                children.extend(self.list("}", |p| p.use_tree())?);
                break;
            }
            if self.at_kind(TokenKind::Ident) {
                children.push(self.bump_leaf());
            } else {
                return self.error("expected a path segment in `use`");
            }
            if !self.eat("::") {
                break;
            }
        }
        if self.at("as") {
            children.push(self.bump_leaf());
            children.push(if self.at("_") { self.bump_leaf() } else { self.name()? });
        }
        Ok(SyntaxNode::new(NodeKind::UseTree, children))
    }

    fn function(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut children = Vec::new();
        // qualifiers: `const`, `async`, `unsafe`, `extern "C"`
        while !self.at("fn") {
            children.push(self.bump_leaf());
        }
        children.push(self.bump_leaf());
        children.push(self.name()?);
        if self.at("<") {
            children.push(self.generic_params()?);
        }
        self.expect("(")?;
        children.extend(self.list(")", |p| p.param())?);
        if self.at("->") {
            children.push(self.bump_leaf());
            children.push(self.ty()?);
        }
        if self.at("where") {
            children.push(self.where_clause()?);
        }
        if !self.eat(";") {
            children.push(self.block()?);
        }
        Ok(children)
    }

    fn param(&mut self) -> PResult<SyntaxNode> {
        let mut children = self.outer_attributes()?;
        // self receivers: `self`, `mut self`, `&self`, `&'a mut self`, `self: T`
        let mut n = 0;
        if self.nth_is(0, "&") {
            n += 1;
            if self.nth(n).is_some_and(|t| t.kind == TokenKind::Lifetime) {
                n += 1;
            }
        }
        if self.nth_is(n, "mut") {
            n += 1;
        }
        if self.nth_is(n, "self") && !self.nth_is(n + 1, "::") {
            for _ in 0..=n {
                children.push(self.bump_leaf());
            }
            if self.eat(":") {
                children.push(self.ty()?);
            }
            return Ok(SyntaxNode::new(NodeKind::Param, children));
        }
        children.push(self.pattern_top()?);
        self.expect(":")?;
        children.push(self.ty()?);
        Ok(SyntaxNode::new(NodeKind::Param, children))
    }

    fn structure(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut children = vec![self.bump_leaf(), self.name()?];
        if self.at("<") {
            children.push(self.generic_params()?);
        }
        if self.at("where") {
            children.push(self.where_clause()?);
        }
        if self.eat(";") {
            return Ok(children);
        }
        if self.eat("(") {
            children.extend(self.list(")", |p| p.tuple_field())?);
            if self.at("where") {
                children.push(self.where_clause()?);
            }
            self.expect(";")?;
            return Ok(children);
        }
        self.expect("{")?;
        children.extend(self.list("}", |p| p.named_field())?);
        Ok(children)
    }

    fn named_field(&mut self) -> PResult<SyntaxNode> {
        let mut children = self.outer_attributes()?;
        if let Some(vis) = self.visibility()? {
            children.push(vis);
        }
        children.push(self.name()?);
        self.expect(":")?;
        children.push(self.ty()?);
        Ok(SyntaxNode::new(NodeKind::Field, children))
    }

    fn tuple_field(&mut self) -> PResult<SyntaxNode> {
        let mut children = self.outer_attributes()?;
        if let Some(vis) = self.visibility()? {
            children.push(vis);
        }
        children.push(self.ty()?);
        Ok(SyntaxNode::new(NodeKind::Field, children))
    }

    fn enumeration(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut children = vec![self.bump_leaf(), self.name()?];
        if self.at("<") {
            children.push(self.generic_params()?);
        }
        if self.at("where") {
            children.push(self.where_clause()?);
        }
        self.expect("{")?;
        children.extend(self.list("}", |p| {
            let mut v = p.outer_attributes()?;
            v.push(p.name()?);
            if p.eat("(") {
                v.extend(p.list(")", |p| p.tuple_field())?);
            } else if p.eat("{") {
                v.extend(p.list("}", |p| p.named_field())?);
            }
            if p.at("=") {
                v.push(p.bump_leaf());
                v.push(p.expr(false)?);
            }
            Ok(SyntaxNode::new(NodeKind::Variant, v))
        })?);
        Ok(children)
    }

    fn implementation(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut children = Vec::new();
        if self.at("unsafe") {
            children.push(self.bump_leaf());
        }
        children.push(self.bump_leaf());
        if self.at("<") && !self.nth_is(1, ">") {
            children.push(self.generic_params()?);
        }
        if self.at("!") {
            children.push(self.bump_leaf());
        }
        children.push(self.ty()?);
        if self.at("for") {
            children.push(self.bump_leaf());
            children.push(self.ty()?);
        }
        if self.at("where") {
            children.push(self.where_clause()?);
        }
        children.extend(self.associated_items()?);
        Ok(children)
    }

    fn trait_def(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut children = Vec::new();
        if self.at("unsafe") {
            children.push(self.bump_leaf());
        }
        children.push(self.bump_leaf());
        children.push(self.name()?);
        if self.at("<") {
            children.push(self.generic_params()?);
        }
        if self.eat(":") {
            children.extend(self.bounds()?);
        }
        if self.at("where") {
            children.push(self.where_clause()?);
        }
        children.extend(self.associated_items()?);
        Ok(children)
    }

    fn associated_items(&mut self) -> PResult<Vec<SyntaxNode>> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.at("}") {
            if self.done() {
                return self.error("expected `}`");
            }
            if self.at("#") && self.nth_is(1, "!") {
                out.push(self.attribute()?);
            } else {
                out.push(self.item()?);
            }
        }
        self.pos += 1;
        Ok(out)
    }

    fn generic_params(&mut self) -> PResult<SyntaxNode> {
        self.expect("<")?;
        let params = self.list(">", |p| {
            let mut v = p.outer_attributes()?;
            if p.at_kind(TokenKind::Lifetime) {
                v.push(p.bump_leaf());
                if p.eat(":") {
                    while p.at_kind(TokenKind::Lifetime) {
                        v.push(p.bump_leaf());
                        if p.at("+") {
                            v.push(p.bump_leaf());
                        } else {
                            break;
                        }
                    }
                }
            } else if p.at("const") {
                v.push(p.bump_leaf());
                v.push(p.name()?);
                p.expect(":")?;
                v.push(p.ty()?);
                if p.at("=") {
                    v.push(p.bump_leaf());
                    v.push(p.primary(true)?);
                }
            } else {
                v.push(p.name()?);
                if p.eat(":") {
                    v.extend(p.bounds()?);
                }
                if p.at("=") {
                    v.push(p.bump_leaf());
                    v.push(p.ty()?);
                }
            }
            Ok(SyntaxNode::new(NodeKind::GenericParam, v))
        })?;
        Ok(SyntaxNode::new(NodeKind::Generics, params))
    }

    fn where_clause(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.bump_leaf()];
        while !(self.at("{") || self.at(";") || self.done()) {
            if self.at_kind(TokenKind::Lifetime) {
                children.push(self.bump_leaf());
                self.expect(":")?;
                while self.at_kind(TokenKind::Lifetime) {
                    children.push(self.bump_leaf());
                    if self.at("+") {
                        children.push(self.bump_leaf());
                    } else {
                        break;
                    }
                }
            } else {
                children.push(self.ty()?);
                self.expect(":")?;
                children.extend(self.bounds()?);
            }
            if !self.eat(",") {
                break;
            }
        }
        Ok(SyntaxNode::new(NodeKind::Where, children))
    }

    /// `Bound + Bound + 'a`, possibly empty.
    fn bounds(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut out = Vec::new();
        loop {
            if self.at_kind(TokenKind::Lifetime) {
                out.push(self.bump_leaf());
            } else if self.at("?") {
                out.push(self.bump_leaf());
                out.push(self.path_type()?);
            } else if self.at("(") {
                self.pos += 1;
                out.extend(self.bounds()?);
                self.expect(")")?;
            } else if self.at("for") {
                out.push(self.bump_leaf());
                out.push(self.generic_params()?);
                out.push(self.path_type()?);
            } else if self.at_kind(TokenKind::Ident) || self.at("::") {
                out.push(self.path_type()?);
            } else {
                break;
            }
            if self.at("+") {
                out.push(self.bump_leaf());
            } else {
                break;
            }
        }
        Ok(out)
    }

    // ---- types -----------------------------------------------------------

    fn ty(&mut self) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        if self.at("&") || self.at("&&") {
            let double = self.at("&&");
            let amp = self.bump_leaf();
            if double {
                children.push(leaf("&", LeafClass::Symbol));
                children.push(leaf("&", LeafClass::Symbol));
            } else {
                children.push(amp);
            }
            if self.at_kind(TokenKind::Lifetime) {
                children.push(self.bump_leaf());
            }
            if self.at("mut") {
                children.push(self.bump_leaf());
            }
            children.push(self.ty()?);
        } else if self.at("*") {
            children.push(self.bump_leaf());
            if self.at("const") || self.at("mut") {
                children.push(self.bump_leaf());
            }
            children.push(self.ty()?);
        } else if self.eat("[") {
            children.push(self.ty()?);
            if self.eat(";") {
                children.push(self.expr(false)?);
            }
            self.expect("]")?;
        } else if self.eat("(") {
            children.extend(self.list(")", |p| p.ty())?);
        } else if self.at("!") || self.at("_") {
            children.push(self.bump_leaf());
        } else if self.at("impl") || self.at("dyn") {
            children.push(self.bump_leaf());
            children.extend(self.bounds()?);
        } else if self.at("fn") || (self.at("unsafe") && self.nth_is(1, "fn")) || (self.at("extern") && !self.nth_is(1, "crate")) {
            while !self.at("fn") {
                children.push(self.bump_leaf());
            }
            children.push(self.bump_leaf());
            self.expect("(")?;
            children.extend(self.list(")", |p| p.ty())?);
            if self.at("->") {
                children.push(self.bump_leaf());
                children.push(self.ty()?);
            }
        } else if self.at("for") {
            children.push(self.bump_leaf());
            children.push(self.generic_params()?);
            children.push(self.ty()?);
        } else if self.at_kind(TokenKind::Ident) || self.at("::") {
            return self.path_type();
        } else {
            return self.error("expected a type");
        }
        Ok(SyntaxNode::new(NodeKind::Type, children))
    }

    /// Type path with generic arguments and `Fn(A) -> B` sugar.
    fn path_type(&mut self) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        self.eat("::");
        loop {
            if !self.at_kind(TokenKind::Ident) {
                return self.error("expected a type path segment");
            }
            children.push(self.bump_leaf());
            if self.at("::") && self.nth_is(1, "<") {
                self.pos += 1;
            }
            if self.at("<") {
                children.extend(self.generic_args()?);
            } else if self.at("(") {
                self.pos += 1;
                children.extend(self.list(")", |p| p.ty())?);
                if self.at("->") {
                    children.push(self.bump_leaf());
                    children.push(self.ty()?);
                }
            }
            if !(self.at("::") && self.nth(1).is_some_and(|t| t.kind == TokenKind::Ident)) {
                break;
            }
            self.pos += 1;
        }
        Ok(SyntaxNode::new(NodeKind::Type, children))
    }

    fn generic_args(&mut self) -> PResult<Vec<SyntaxNode>> {
        self.expect("<")?;
        self.list(">", |p| {
            if p.at_kind(TokenKind::Lifetime) {
                Ok(p.bump_leaf())
            } else if p.at_kind(TokenKind::Int) || p.at("{") || p.at("-") {
                p.primary(true)
            } else if p.at_name() && (p.nth_is(1, "=") || (p.nth_is(1, ":") && !p.nth_is(1, "::"))) {
                let mut v = vec![p.bump_leaf()];
                if p.eat(":") {
                    v.extend(p.bounds()?);
                } else {
                    v.push(p.bump_leaf());
                    v.push(p.ty()?);
                }
                Ok(SyntaxNode::new(NodeKind::Type, v))
            } else {
                p.ty()
            }
        })
    }

    // ---- blocks and statements ------------------------------------------

    fn block(&mut self) -> PResult<SyntaxNode> {
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.at("}") {
            if self.done() {
                return self.error("expected `}`");
            }
            if self.eat(";") {
                continue;
            }
            if self.at("#") && self.nth_is(1, "!") {
                stmts.push(self.attribute()?);
                continue;
            }
            let attrs = if self.at("#") { self.outer_attributes()? } else { vec![] };
            if self.starts_item() {
                let mut item = self.item()?;
                item.children.splice(0..0, attrs);
                stmts.push(item);
            } else if self.at("let") {
                let mut children = attrs;
                children.extend(self.let_statement()?);
                stmts.push(SyntaxNode::new(NodeKind::Let, children));
            } else {
                let mut children = attrs;
                if self.starts_block_like() {
                    children.push(self.block_like()?);
                    self.eat(";");
                } else {
                    children.push(self.expr(false)?);
                    if !self.eat(";") && !self.at("}") {
                        return self.error("expected `;` or `}`");
                    }
                }
                stmts.push(SyntaxNode::new(NodeKind::ExprStmt, children));
            }
        }
        self.pos += 1;
        Ok(SyntaxNode::new(NodeKind::Block, stmts))
    }

    fn let_statement(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut children = vec![self.bump_leaf(), self.pattern_top()?];
        if self.eat(":") {
            children.push(self.ty()?);
        }
        if self.at("=") {
            children.push(self.bump_leaf());
            children.push(self.expr(false)?);
            if self.at("else") {
                children.push(self.bump_leaf());
                children.push(self.block()?);
            }
        }
        self.expect(";")?;
        Ok(children)
    }

    fn starts_block_like(&self) -> bool {
        (self.at("if") || self.at("match") || self.at("for") || self.at("while") || self.at("loop") || self.at("{"))
            || (self.at("unsafe") && self.nth_is(1, "{"))
            || (self.at_kind(TokenKind::Lifetime) && self.nth_is(1, ":"))
    }

    /// Block-like expressions, which end a statement without `;`.
    fn block_like(&mut self) -> PResult<SyntaxNode> {
        let mut label = None;
        if self.at_kind(TokenKind::Lifetime) {
            label = Some(self.bump_leaf());
            self.expect(":")?;
        }
        let mut node = if self.at("if") {
            self.if_expr()?
        } else if self.at("match") {
            self.match_expr()?
        } else if self.at("for") {
            let mut children = vec![self.bump_leaf(), self.pattern_top()?, self.expect_leaf("in")?];
            children.push(self.expr(true)?);
            children.push(self.block()?);
            SyntaxNode::new(NodeKind::For, children)
        } else if self.at("while") {
            let children = vec![self.bump_leaf(), self.condition()?, self.block()?];
            SyntaxNode::new(NodeKind::While, children)
        } else if self.at("loop") {
            let children = vec![self.bump_leaf(), self.block()?];
            SyntaxNode::new(NodeKind::Loop, children)
        } else if self.at("unsafe") {
            let kw = self.bump_leaf();
            let mut block = self.block()?;
            block.children.insert(0, kw);
            block
        } else {
            self.block()?
        };
        if let Some(l) = label {
            node.children.insert(0, l);
        }
        Ok(node)
    }

    fn if_expr(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.bump_leaf(), self.condition()?, self.block()?];
        if self.at("else") {
            children.push(self.bump_leaf());
            if self.at("if") {
                children.push(self.if_expr()?);
            } else {
                children.push(self.block()?);
            }
        }
        Ok(SyntaxNode::new(NodeKind::If, children))
    }

    /// `if`/`while` condition, including `let` patterns.
    fn condition(&mut self) -> PResult<SyntaxNode> {
        self.expr(true)
    }

    fn match_expr(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.bump_leaf(), self.expr(true)?];
        self.expect("{")?;
        while !self.at("}") {
            if self.done() {
                return self.error("expected `}`");
            }
            let mut arm = self.outer_attributes()?;
            arm.push(self.pattern_top()?);
            if self.at("if") {
                let kw = self.bump_leaf();
                let guard = self.expr(false)?;
                arm.push(SyntaxNode::new(NodeKind::Guard, vec![kw, guard]));
            }
            arm.push(self.expect_leaf("=>")?);
            if self.starts_block_like() {
                arm.push(self.block_like()?);
                self.eat(",");
            } else {
                arm.push(self.expr(false)?);
                if !self.eat(",") && !self.at("}") {
                    return self.error("expected `,` or `}` after match arm");
                }
            }
            children.push(SyntaxNode::new(NodeKind::Arm, arm));
        }
        self.pos += 1;
        Ok(SyntaxNode::new(NodeKind::Match, children))
    }

    // ---- expressions -----------------------------------------------------

    fn expr(&mut self, no_struct: bool) -> PResult<SyntaxNode> {
        self.expr_bp(0, no_struct)
    }

    /// Binary operator at the cursor with its binding power and token count.
    fn infix_op(&self) -> Option<(String, u8, usize)> {
        let t = self.peek()?;
        if t.kind != TokenKind::Punct && t.text != "as" {
            return None;
        }
        if t.text == ">" {
            let next = self.nth(1);
            if t.joint && next.is_some_and(|n| n.text == ">") {
                let third = self.nth(2);
                if next.is_some_and(|n| n.joint) && third.is_some_and(|n| n.text == "=") {
                    return Some((">>=".into(), 1, 3));
                }
                return Some((">>".into(), 9, 2));
            }
            if t.joint && next.is_some_and(|n| n.text == "=") {
                return Some((">=".into(), 5, 2));
            }
            return Some((">".into(), 5, 1));
        }
        let bp = match t.text.as_str() {
            "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "^=" | "&=" | "|=" | "<<=" => 1,
            ".." | "..=" => 2,
            "||" => 3,
            "&&" => 4,
            "==" | "!=" | "<" | "<=" => 5,
            "|" => 6,
            "^" => 7,
            "&" => 8,
            "<<" => 9,
            "+" | "-" => 10,
            "*" | "/" | "%" => 11,
            "as" => 12,
            _ => return None,
        };
        Some((t.text.clone(), bp, 1))
    }

    fn can_start_expr(&self, no_struct: bool) -> bool {
        match self.peek() {
            None => false,
            Some(t) => match t.kind {
                TokenKind::Punct => {
                    matches!(t.text.as_str(), "(" | "[" | "-" | "!" | "*" | "&" | "&&" | "|" | "||" | ".." | "::" | "<")
                        || (t.text == "{" && !no_struct)
                }
                _ => !matches!(t.text.as_str(), "as" | "else" | "in"),
            },
        }
    }

    fn expr_bp(&mut self, min_bp: u8, no_struct: bool) -> PResult<SyntaxNode> {
        let mut lhs = if self.at("..") || self.at("..=") {
            let op = self.bump_leaf();
            let mut children = vec![op];
            if self.can_start_expr(no_struct) {
                children.push(self.expr_bp(3, no_struct)?);
            }
            SyntaxNode::new(NodeKind::Range, children)
        } else {
            self.unary(no_struct)?
        };
        while let Some((op, bp, width)) = self.infix_op() {
            if bp < min_bp {
                break;
            }
            self.pos += width;
            let op_leaf = leaf(&op, if op == "as" { LeafClass::Keyword } else { LeafClass::Symbol });
            lhs = match op.as_str() {
                "as" => SyntaxNode::new(NodeKind::Cast, vec![lhs, op_leaf, self.cast_type()?]),
                ".." | "..=" => {
                    let mut children = vec![lhs, op_leaf];
                    if self.can_start_expr(no_struct) {
                        children.push(self.expr_bp(bp + 1, no_struct)?);
                    }
                    SyntaxNode::new(NodeKind::Range, children)
                }
                _ if bp == 1 => {
                    // right associative
                    let rhs = self.expr_bp(1, no_struct)?;
                    SyntaxNode::new(NodeKind::Assign, vec![lhs, op_leaf, rhs])
                }
                _ => {
                    let rhs = self.expr_bp(bp + 1, no_struct)?;
                    SyntaxNode::new(NodeKind::Binary, vec![lhs, op_leaf, rhs])
                }
            };
        }
        Ok(lhs)
    }

    /// Cast targets are plain paths or references; generic `<` would clash
    /// with comparison, so only explicit arguments are accepted.
    fn cast_type(&mut self) -> PResult<SyntaxNode> {
        if self.at_kind(TokenKind::Ident) && !self.nth_is(1, "<") && !self.nth_is(1, "::") {
            let name = self.bump_leaf();
            return Ok(SyntaxNode::new(NodeKind::Type, vec![name]));
        }
        self.ty()
    }

    fn unary(&mut self, no_struct: bool) -> PResult<SyntaxNode> {
        if self.at("-") || self.at("!") || self.at("*") {
            let op = self.bump_leaf();
            let operand = self.unary(no_struct)?;
            return Ok(SyntaxNode::new(NodeKind::Unary, vec![op, operand]));
        }
        if self.at("&") || self.at("&&") {
            let double = self.at("&&");
            self.pos += 1;
            let mut children = vec![leaf("&", LeafClass::Symbol)];
            if self.at("mut") {
                children.push(self.bump_leaf());
            }
            children.push(self.unary(no_struct)?);
            let node = SyntaxNode::new(NodeKind::Unary, children);
            if double {
                return Ok(SyntaxNode::new(NodeKind::Unary, vec![leaf("&", LeafClass::Symbol), node]));
            }
            return Ok(node);
        }
        let base = self.primary(no_struct)?;
        self.postfix(base)
    }

    fn postfix(&mut self, mut base: SyntaxNode) -> PResult<SyntaxNode> {
        loop {
            if self.at("?") {
                let op = self.bump_leaf();
                base = SyntaxNode::new(NodeKind::Try, vec![base, op]);
            } else if self.at("(") {
                self.pos += 1;
                let mut children = vec![base];
                children.extend(self.list(")", |p| p.expr(false))?);
                base = SyntaxNode::new(NodeKind::Call, children);
            } else if self.at("[") {
                self.pos += 1;
                let index = self.expr(false)?;
                self.expect("]")?;
                base = SyntaxNode::new(NodeKind::Index, vec![base, index]);
            } else if self.at(".") {
                let dot = self.bump_leaf();
                let Some(t) = self.peek() else {
                    return self.error("expected a field or method name");
                };
                match t.kind {
                    TokenKind::Int => {
                        let field = self.bump_leaf();
                        base = SyntaxNode::new(NodeKind::FieldAccess, vec![base, dot, field]);
                    }
                    TokenKind::Float => {
                        // `x.0.1` lexes as `x` `.` `0.1`
                        let text = self.toks[self.pos].text.clone();
                        self.pos += 1;
                        let (a, b) = text.split_once('.').expect("float token has a dot");
                        let first = SyntaxNode::new(NodeKind::FieldAccess, vec![base, dot, leaf(a, LeafClass::Literal)]);
                        base = SyntaxNode::new(
                            NodeKind::FieldAccess,
                            vec![first, leaf(".", LeafClass::Symbol), leaf(b, LeafClass::Literal)],
                        );
                    }
                    TokenKind::Ident => {
                        let name = self.bump_leaf();
                        let mut children = vec![base, dot, name];
                        if self.at("::") && self.nth_is(1, "<") {
                            self.pos += 1;
                            children.extend(self.generic_args()?);
                        }
                        if self.eat("(") {
                            children.extend(self.list(")", |p| p.expr(false))?);
                            base = SyntaxNode::new(NodeKind::MethodCall, children);
                        } else {
                            base = SyntaxNode::new(NodeKind::FieldAccess, children);
                        }
                    }
                    _ => return self.error("expected a field or method name"),
                }
            } else {
                return Ok(base);
            }
        }
    }

    fn primary(&mut self, no_struct: bool) -> PResult<SyntaxNode> {
        let Some(t) = self.peek() else {
            return self.error("expected an expression");
        };
        match t.kind {
            TokenKind::Int | TokenKind::Float | TokenKind::Str | TokenKind::Char => {
                let lit = self.bump_leaf();
                return Ok(SyntaxNode::new(NodeKind::Literal, vec![lit]));
            }
            TokenKind::Lifetime if self.nth_is(1, ":") => return self.block_like(),
            _ => {}
        }
        if self.at("true") || self.at("false") {
            let lit = self.bump_leaf();
            return Ok(SyntaxNode::new(NodeKind::Literal, vec![lit]));
        }
        if self.starts_block_like() {
            return self.block_like();
        }
        if self.at("(") {
            self.pos += 1;
            if self.eat(")") {
                return Ok(SyntaxNode::new(NodeKind::Tuple, vec![]));
            }
            let first = self.expr(false)?;
            if self.eat(")") {
                return Ok(SyntaxNode::new(NodeKind::Paren, vec![first]));
            }
            self.expect(",")?;
            let mut items = vec![first];
            items.extend(self.list(")", |p| p.expr(false))?);
            return Ok(SyntaxNode::new(NodeKind::Tuple, items));
        }
        if self.at("[") {
            self.pos += 1;
            if self.eat("]") {
                return Ok(SyntaxNode::new(NodeKind::Array, vec![]));
            }
            let first = self.expr(false)?;
            if self.eat(";") {
                let count = self.expr(false)?;
                self.expect("]")?;
                return Ok(SyntaxNode::new(NodeKind::Array, vec![first, count]));
            }
            let mut items = vec![first];
            if self.eat(",") {
                items.extend(self.list("]", |p| p.expr(false))?);
            } else {
                self.expect("]")?;
            }
            return Ok(SyntaxNode::new(NodeKind::Array, items));
        }
        if self.at("|") || self.at("||") || self.at("move") || (self.at("async") && self.nth_is(1, "move")) {
            return self.closure(no_struct);
        }
        if self.at("return") || self.at("break") {
            let is_break = self.at("break");
            let mut children = vec![self.bump_leaf()];
            if is_break && self.at_kind(TokenKind::Lifetime) {
                children.push(self.bump_leaf());
            }
            if self.can_start_expr(no_struct) {
                children.push(self.expr(no_struct)?);
            }
            let kind = if is_break { NodeKind::Break } else { NodeKind::Return };
            return Ok(SyntaxNode::new(kind, children));
        }
        if self.at("continue") {
            let mut children = vec![self.bump_leaf()];
            if self.at_kind(TokenKind::Lifetime) {
                children.push(self.bump_leaf());
            }
            return Ok(SyntaxNode::new(NodeKind::Continue, children));
        }
        if self.at("let") {
            // `if let` / `while let`; the scrutinee binds tighter than `&&`
            let mut children = vec![self.bump_leaf(), self.pattern_top()?, self.expect_leaf("=")?];
            children.push(self.expr_bp(5, no_struct)?);
            return Ok(SyntaxNode::new(NodeKind::Let, children));
        }
        if self.at_kind(TokenKind::Ident) || self.at("::") {
            return self.path_expr(no_struct);
        }
        self.error("expected an expression")
    }

    fn closure(&mut self, no_struct: bool) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        if self.at("async") {
            children.push(self.bump_leaf());
        }
        if self.at("move") {
            children.push(self.bump_leaf());
        }
        if !self.eat("||") {
            self.expect("|")?;
            while !self.at("|") {
                let mut param = vec![self.pattern_no_top()?];
                if self.eat(":") {
                    param.push(self.ty()?);
                }
                children.push(SyntaxNode::new(NodeKind::Param, param));
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("|")?;
        }
        if self.at("->") {
            children.push(self.bump_leaf());
            children.push(self.ty()?);
            children.push(self.block()?);
        } else {
            children.push(self.expr(no_struct)?);
        }
        Ok(SyntaxNode::new(NodeKind::Closure, children))
    }

    /// Expression path, macro call or struct literal.
    fn path_expr(&mut self, no_struct: bool) -> PResult<SyntaxNode> {
        let path = self.path(true)?;
        if self.at("!") && !self.nth_is(1, "=") && (self.nth_is(1, "(") || self.nth_is(1, "[") || self.nth_is(1, "{")) {
            self.pos += 1;
            return self.macro_call(path);
        }
        let last_upper = path
            .children
            .last()
            .and_then(|c| c.leaf.as_ref())
            .is_some_and(|l| l.text.starts_with(|c: char| c.is_uppercase()));
        if self.at("{") && !no_struct && last_upper {
            self.pos += 1;
            let mut children = vec![path];
            while !self.at("}") {
                if self.at("..") {
                    let op = self.bump_leaf();
                    let mut rest = vec![op];
                    if !self.at("}") {
                        rest.push(self.expr(false)?);
                    }
                    children.push(SyntaxNode::new(NodeKind::Range, rest));
                    break;
                }
                let mut field = vec![if self.at_kind(TokenKind::Int) { self.bump_leaf() } else { self.name()? }];
                if self.eat(":") {
                    field.push(self.expr(false)?);
                }
                children.push(SyntaxNode::new(NodeKind::FieldInit, field));
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("}")?;
            return Ok(SyntaxNode::new(NodeKind::StructLit, children));
        }
        Ok(path)
    }

    /// `a::b::<T>::c`. With `turbofish` set, generic arguments need `::<`.
    fn path(&mut self, turbofish: bool) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        self.eat("::");
        loop {
            if !self.at_kind(TokenKind::Ident) {
                return self.error("expected a path segment");
            }
            children.push(self.bump_leaf());
            if self.at("::") && self.nth_is(1, "<") {
                self.pos += 1;
                children.extend(self.generic_args()?);
            } else if !turbofish && self.at("<") {
                children.extend(self.generic_args()?);
            }
            if self.at("::") && self.nth(1).is_some_and(|t| t.kind == TokenKind::Ident) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(SyntaxNode::new(NodeKind::Path, children))
    }

    fn macro_call(&mut self, path: SyntaxNode) -> PResult<SyntaxNode> {
        let close = match self.peek().map(|t| t.text.as_str()) {
            Some("(") => ")",
            Some("[") => "]",
            _ => "}",
        };
        let start = self.pos;
        let mut children = vec![path];
        // most macros take expression lists (`vec![x; n]`, `format!(..)`)
        self.pos += 1;
        let parsed: PResult<Vec<SyntaxNode>> = (|| {
            let mut out = Vec::new();
            while !self.at(close) {
                out.push(self.expr(false)?);
                if !(self.eat(",") || self.eat(";")) {
                    break;
                }
            }
            self.expect(close)?;
            Ok(out)
        })();
        match parsed {
            Ok(args) => children.extend(args),
            Err(_) => {
                self.pos = start;
                children.extend(self.token_tree()?);
            }
        }
        Ok(SyntaxNode::new(NodeKind::Macro, children))
    }

    // ---- patterns --------------------------------------------------------

    fn pattern_top(&mut self) -> PResult<SyntaxNode> {
        self.eat("|");
        let first = self.pattern_no_top()?;
        if !self.at("|") {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.at("|") {
            children.push(self.bump_leaf());
            children.push(self.pattern_no_top()?);
        }
        Ok(SyntaxNode::new(NodeKind::Pattern, children))
    }

    fn pattern_no_top(&mut self) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        if self.at("_") || self.at("..") {
            children.push(self.bump_leaf());
        } else if self.at("&") || self.at("&&") {
            let double = self.at("&&");
            self.pos += 1;
            children.push(leaf("&", LeafClass::Symbol));
            if double {
                children.push(leaf("&", LeafClass::Symbol));
            }
            if self.at("mut") {
                children.push(self.bump_leaf());
            }
            children.push(self.pattern_no_top()?);
        } else if self.eat("(") {
            children.extend(self.list(")", |p| p.pattern_top())?);
        } else if self.eat("[") {
            children.extend(self.list("]", |p| p.pattern_top())?);
        } else if self.at("-") || self.at_kind(TokenKind::Int) || self.at_kind(TokenKind::Float) || self.at_kind(TokenKind::Str) || self.at_kind(TokenKind::Char) || self.at("true") || self.at("false") {
            if self.at("-") {
                children.push(self.bump_leaf());
            }
            children.push(self.bump_leaf());
            if self.at("..=") || self.at("..") {
                children.push(self.bump_leaf());
                if self.at("-") {
                    children.push(self.bump_leaf());
                }
                if self.at_kind(TokenKind::Int) || self.at_kind(TokenKind::Float) || self.at_kind(TokenKind::Char) {
                    children.push(self.bump_leaf());
                }
            }
        } else if self.at("ref") || self.at("mut") || (self.at_name() && !self.nth_is(1, "::") && !self.nth_is(1, "(") && !self.nth_is(1, "{") && !self.nth_is(1, "!")) {
            if self.at("ref") {
                children.push(self.bump_leaf());
            }
            if self.at("mut") {
                children.push(self.bump_leaf());
            }
            children.push(self.name()?);
            if self.at("@") {
                children.push(self.bump_leaf());
                children.push(self.pattern_no_top()?);
            }
        } else if self.at_kind(TokenKind::Ident) || self.at("::") {
            children.push(self.path(true)?);
            if self.eat("(") {
                children.extend(self.list(")", |p| p.pattern_top())?);
            } else if self.eat("{") {
                while !self.at("}") {
                    if self.at("..") {
                        children.push(self.bump_leaf());
                        break;
                    }
                    let mut field = Vec::new();
                    if self.at("ref") || self.at("mut") {
                        field.push(self.bump_leaf());
                    }
                    field.push(if self.at_kind(TokenKind::Int) { self.bump_leaf() } else { self.name()? });
                    if self.eat(":") {
                        field.push(self.pattern_top()?);
                    }
                    children.push(SyntaxNode::new(NodeKind::Pattern, field));
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
            }
        } else {
            return self.error("expected a pattern");
        }
        Ok(SyntaxNode::new(NodeKind::Pattern, children))
    }
}

fn leaf(text: &str, class: LeafClass) -> SyntaxNode {
    SyntaxNode {
        kind: NodeKind::Leaf,
        leaf: Some(Leaf {
            text: text.to_string(),
            class,
        }),
        children: vec![],
    }
}
