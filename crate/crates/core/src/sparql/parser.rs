use std::collections::BTreeMap;

use super::{dedup_patterns, well_known_prefixes, Query, QueryError, TriplePattern};
use crate::rdf::term::is_forbidden_iri_char;
use crate::rdf::{Iri, Literal, Term, TermPattern, Variable};
use crate::vocab;

/// Keywords that are legal SPARQL but outside the supported subset.
const UNSUPPORTED: &[&str] = &[
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "INSERT",
    "DELETE",
    "LOAD",
    "CLEAR",
    "DROP",
    "CREATE",
    "WITH",
    "BASE",
    "FROM",
    "NAMED",
    "REDUCED",
    "OPTIONAL",
    "UNION",
    "FILTER",
    "MINUS",
    "BIND",
    "VALUES",
    "SERVICE",
    "GRAPH",
    "ORDER",
    "GROUP",
    "HAVING",
    "OFFSET",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    Var(String),
    Str(String),
    Integer(String),
    LangTag(String),
    Word(String),
    BlankNode,
    LBrace,
    RBrace,
    Dot,
    Semicolon,
    Comma,
    Star,
    DoubleCaret,
    Open(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::IriRef(i) => format!("IRI <{i}>"),
            Tok::PName { prefix, local } => format!("prefixed name `{prefix}:{local}`"),
            Tok::Var(v) => format!("variable ?{v}"),
            Tok::Str(_) => "string literal".into(),
            Tok::Integer(n) => format!("number {n}"),
            Tok::LangTag(t) => format!("language tag @{t}"),
            Tok::Word(w) => format!("`{w}`"),
            Tok::BlankNode => "blank node".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semicolon => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Star => "`*`".into(),
            Tok::DoubleCaret => "`^^`".into(),
            Tok::Open(c) => format!("`{c}`"),
        }
    }
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

enum LexError {
    Syntax(usize, String),
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.text[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    /// Name characters, allowing interior (but not trailing) dots.
    fn name(&mut self, extra: fn(char) -> bool) -> String {
        self.name_with(extra, true)
    }

    fn name_with(&mut self, extra: fn(char) -> bool, dots: bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            let interior_dot = dots && c == '.' && self.peek_at(1).is_some_and(|n| is_name_char(n) || extra(n));
            if !(is_name_char(c) || extra(c) || interior_dot) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, LexError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.pos;
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '<' => {
                    self.bump();
                    let mut iri = String::new();
                    loop {
                        match self.bump() {
                            Some('>') => break,
                            Some(c) if is_forbidden_iri_char(c) => {
                                return Err(LexError::Syntax(start, format!("character {c:?} not allowed in IRI")))
                            }
                            Some(c) => iri.push(c),
                            None => return Err(LexError::Syntax(start, "unterminated IRI".into())),
                        }
                    }
                    Tok::IriRef(iri)
                }
                '?' | '$' => {
                    self.bump();
                    let name = self.name_with(|_| false, false);
                    if name.is_empty() || name.contains('-') {
                        return Err(LexError::Syntax(start, "invalid variable name".into()));
                    }
                    Tok::Var(name)
                }
                '"' | '\'' => Tok::Str(self.string(start)?),
                '@' => {
                    self.bump();
                    Tok::LangTag(self.name(|_| false))
                }
                '0'..='9' => {
                    let mut digits = String::new();
                    while let Some(d) = self.peek().filter(char::is_ascii_digit) {
                        digits.push(d);
                        self.bump();
                    }
                    Tok::Integer(digits)
                }
                '^' => {
                    self.bump();
                    if self.peek() == Some('^') {
                        self.bump();
                        Tok::DoubleCaret
                    } else {
                        Tok::Open('^')
                    }
                }
                '_' if self.peek_at(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    self.name(|_| false);
                    Tok::BlankNode
                }
                '{' | '}' | '.' | ';' | ',' | '*' | '(' | ')' | '[' | ']' | '!' | '|' | '/' => {
                    self.bump();
                    match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '.' => Tok::Dot,
                        ';' => Tok::Semicolon,
                        ',' => Tok::Comma,
                        '*' => Tok::Star,
                        other => Tok::Open(other),
                    }
                }
                ':' => {
                    self.bump();
                    let local = self.name(|c| c == ':' || c == '%');
                    Tok::PName {
                        prefix: String::new(),
                        local,
                    }
                }
                c if c.is_alphabetic() => {
                    let word = self.name(|_| false);
                    if self.peek() == Some(':') {
                        self.bump();
                        let local = self.name(|c| c == ':' || c == '%');
                        Tok::PName { prefix: word, local }
                    } else {
                        Tok::Word(word)
                    }
                }
                other => return Err(LexError::Syntax(start, format!("unexpected character {other:?}"))),
            };
            out.push((start, tok));
        }
        Ok(out)
    }

    fn string(&mut self, start: usize) -> Result<String, LexError> {
        let quote = self.bump().unwrap();
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n' | '\r') => return Err(LexError::Syntax(start, "unterminated string literal".into())),
                Some(c) if c == quote => return Ok(out),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{C}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some(u @ ('u' | 'U')) => {
                            let n = if u == 'u' { 4 } else { 8 };
                            let mut v = 0u32;
                            for _ in 0..n {
                                let d = self
                                    .bump()
                                    .and_then(|c| c.to_digit(16))
                                    .ok_or_else(|| LexError::Syntax(start, "invalid unicode escape".into()))?;
                                v = v * 16 + d;
                            }
                            char::from_u32(v).ok_or_else(|| LexError::Syntax(start, "invalid unicode escape".into()))?
                        }
                        _ => return Err(LexError::Syntax(start, "invalid escape sequence".into())),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(usize, Tok)>,
    idx: usize,
    prefixes: BTreeMap<String, Iri>,
}

/// Parses query text into a [`Query`] with every prefixed name expanded.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let toks = Lexer { text, pos: 0 }.tokens().map_err(|e| match e {
        LexError::Syntax(pos, reason) => syntax(text, pos, reason),
    })?;
    let mut parser = Parser {
        text,
        toks,
        idx: 0,
        prefixes: well_known_prefixes(),
    };
    parser.query()
}

fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let before = &text[..pos.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax(text: &str, position: usize, reason: impl Into<String>) -> QueryError {
    let (line, column) = line_col(text, position);
    QueryError::Syntax {
        position,
        line,
        column,
        reason: reason.into(),
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.text.len(), |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T, QueryError> {
        Err(syntax(self.text, self.pos(), reason))
    }

    fn unsupported<T>(&self, feature: impl Into<String>) -> Result<T, QueryError> {
        let position = self.pos();
        let (line, column) = line_col(self.text, position);
        Err(QueryError::Unsupported {
            feature: feature.into(),
            position,
            line,
            column,
        })
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, QueryError> {
        match self.peek() {
            Some(Tok::Word(w)) if is_unsupported_keyword(w) => self.unsupported(w.to_uppercase()),
            Some(Tok::BlankNode) => self.unsupported("blank nodes"),
            Some(Tok::Open('[' | ']')) => self.unsupported("blank node property lists"),
            Some(Tok::Open('(' | ')')) => self.unsupported("expressions and collections"),
            Some(Tok::LangTag(_)) => self.unsupported("language-tagged literals"),
            Some(t) => self.err(format!("expected {expected}, found {}", t.describe())),
            None => self.err(format!("expected {expected}, found end of query")),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        while self.keyword("PREFIX") {
            self.next();
            let prefix = match self.next() {
                Some(Tok::PName { prefix, local }) if local.is_empty() => prefix,
                _ => {
                    self.idx -= 1;
                    return self.unexpected("prefix name ending in `:`");
                }
            };
            let iri = match self.peek() {
                Some(Tok::IriRef(raw)) => {
                    let raw = raw.clone();
                    self.iri(&raw)?
                }
                _ => return self.unexpected("IRI after prefix name"),
            };
            self.next();
            self.prefixes.insert(prefix, iri);
        }

        if !self.keyword("SELECT") {
            return self.unexpected("SELECT");
        }
        self.next();
        let mut distinct = false;
        if self.keyword("DISTINCT") {
            self.next();
            distinct = true;
        }
        let mut select: Vec<(usize, Variable)> = Vec::new();
        while let Some(Tok::Var(name)) = self.peek() {
            let v = Variable::new(name).expect("lexer validated variable name");
            let at = self.pos();
            self.next();
            if !select.iter().any(|(_, s)| s == &v) {
                select.push((at, v));
            }
        }
        if select.is_empty() {
            return match self.peek() {
                Some(Tok::Star) => self.unsupported("SELECT *"),
                _ => self.unexpected("projected variable"),
            };
        }

        if self.keyword("WHERE") {
            self.next();
        }
        if self.peek() != Some(&Tok::LBrace) {
            return self.unexpected("`{`");
        }
        let open = self.pos();
        self.next();
        let patterns = self.triples_block()?;
        if patterns.is_empty() {
            return Err(syntax(self.text, open, "empty graph pattern"));
        }

        let mut limit = None;
        if self.keyword("LIMIT") {
            self.next();
            match self.next() {
                Some(Tok::Integer(n)) => match n.parse::<u64>() {
                    Ok(n) if n > 0 => limit = Some(n),
                    _ => {
                        self.idx -= 1;
                        return self.err("LIMIT must be a positive integer");
                    }
                },
                _ => {
                    self.idx -= 1;
                    return self.unexpected("integer after LIMIT");
                }
            }
        }
        if self.peek().is_some() {
            return self.unexpected("end of query");
        }

        let patterns = dedup_patterns(patterns);
        for (at, v) in &select {
            if !patterns.iter().any(|p| p.variables().any(|pv| pv == v)) {
                return Err(syntax(
                    self.text,
                    *at,
                    format!("projected variable {v} does not occur in the graph pattern"),
                ));
            }
        }

        Ok(Query {
            select: select.into_iter().map(|(_, v)| v).collect(),
            patterns,
            distinct,
            limit,
            prefixes: std::mem::take(&mut self.prefixes),
        })
    }

    /// Patterns up to and including the closing `}`.
    fn triples_block(&mut self) -> Result<Vec<TriplePattern>, QueryError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.next();
                    return Ok(out);
                }
                Some(Tok::LBrace) => return self.unsupported("nested group graph patterns"),
                None => return self.err("unterminated graph pattern, expected `}`"),
                _ => {}
            }
            let subject = self.subject()?;
            loop {
                let predicate = self.predicate()?;
                loop {
                    let object = self.object()?;
                    out.push(TriplePattern {
                        subject: subject.clone(),
                        predicate: predicate.clone(),
                        object,
                    });
                    if self.peek() == Some(&Tok::Comma) {
                        self.next();
                    } else {
                        break;
                    }
                }
                if self.peek() == Some(&Tok::Semicolon) {
                    self.next();
                    if matches!(self.peek(), Some(Tok::Dot | Tok::RBrace)) {
                        break;
                    }
                } else {
                    break;
                }
            }
            match self.peek() {
                Some(Tok::Dot) => {
                    self.next();
                }
                Some(Tok::RBrace) => {}
                _ => return self.unexpected("`.` or `}` after triple pattern"),
            }
        }
    }

    fn iri(&self, raw: &str) -> Result<Iri, QueryError> {
        Iri::new(raw).or_else(|e| self.err(e.to_string()))
    }

    fn pname(&self, prefix: &str, local: &str) -> Result<Iri, QueryError> {
        let Some(ns) = self.prefixes.get(prefix) else {
            return self.err(format!("undeclared prefix `{prefix}:`"));
        };
        self.iri(&format!("{}{}", ns.as_str(), local))
    }

    fn iri_like(&mut self) -> Option<Result<Iri, QueryError>> {
        let r = match self.peek()? {
            Tok::IriRef(raw) => self.iri(raw),
            Tok::PName { prefix, local } => self.pname(prefix, local),
            _ => return None,
        };
        if r.is_ok() {
            self.next();
        }
        Some(r)
    }

    fn subject(&mut self) -> Result<TermPattern, QueryError> {
        if let Some(Tok::Var(name)) = self.peek() {
            let v = Variable::new(name).expect("lexer validated variable name");
            self.next();
            return Ok(TermPattern::Variable(v));
        }
        if let Some(iri) = self.iri_like() {
            return iri.map(TermPattern::from);
        }
        match self.peek() {
            Some(Tok::Str(_) | Tok::Integer(_)) => self.err("literal in subject position"),
            _ => self.unexpected("subject"),
        }
    }

    fn predicate(&mut self) -> Result<TermPattern, QueryError> {
        match self.peek() {
            Some(Tok::Var(name)) => {
                let v = Variable::new(name).expect("lexer validated variable name");
                self.next();
                return Ok(TermPattern::Variable(v));
            }
            Some(Tok::Word(w)) if w == "a" => {
                self.next();
                return Ok(TermPattern::from(vocab::rdf_type()));
            }
            _ => {}
        }
        if let Some(iri) = self.iri_like() {
            return iri.map(TermPattern::from);
        }
        match self.peek() {
            Some(Tok::Open('^' | '!')) => self.unsupported("property paths"),
            _ => self.unexpected("predicate"),
        }
    }

    fn object(&mut self) -> Result<TermPattern, QueryError> {
        match self.peek() {
            Some(Tok::Var(name)) => {
                let v = Variable::new(name).expect("lexer validated variable name");
                self.next();
                return Ok(TermPattern::Variable(v));
            }
            Some(Tok::Str(lex)) => {
                let lex = lex.clone();
                self.next();
                return match self.peek() {
                    Some(Tok::DoubleCaret) => {
                        self.next();
                        match self.iri_like() {
                            Some(dt) => Ok(Term::Literal(Literal::typed(lex, dt?)).into()),
                            None => self.unexpected("datatype IRI"),
                        }
                    }
                    Some(Tok::LangTag(_)) => self.unsupported("language-tagged literals"),
                    _ => Ok(Term::Literal(Literal::simple(lex)).into()),
                };
            }
            Some(Tok::Integer(n)) => {
                let n = n.clone();
                self.next();
                return Ok(Term::Literal(Literal::typed(n, vocab::xsd_integer())).into());
            }
            _ => {}
        }
        if let Some(iri) = self.iri_like() {
            return iri.map(TermPattern::from);
        }
        self.unexpected("object")
    }
}

fn is_unsupported_keyword(w: &str) -> bool {
    UNSUPPORTED.iter().any(|k| k.eq_ignore_ascii_case(w))
}
