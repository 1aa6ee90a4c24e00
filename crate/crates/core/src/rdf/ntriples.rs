//! N-Triples reading and writing.
//!
//! This is the only document syntax used on the wire and in fixture files.
//! Blank nodes and language-tagged literals are rejected.

use std::iter::Peekable;
use std::str::CharIndices;

use thiserror::Error;

use super::term::is_forbidden_iri_char;
use super::{Graph, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct NTriplesError {
    pub line: usize,
    pub reason: String,
}

/// Parses a whole document. Any malformed line fails the whole parse.
pub fn parse_ntriples(text: &str) -> Result<Graph, NTriplesError> {
    let mut graph = Graph::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(triple) = parse_line(line).map_err(|reason| NTriplesError { line: line_no, reason })? {
            graph.insert(triple);
        }
    }
    Ok(graph)
}

/// Writes one statement per line in (s, p, o) order.
pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut out = String::new();
    for triple in graph.iter() {
        out.push_str(&triple.to_string());
        out.push('\n');
    }
    out
}

/// Parses a single term written in N-Triples syntax, e.g. `<http://ex/a>` or
/// `"5"^^<http://www.w3.org/2001/XMLSchema#integer>`.
pub fn parse_term(text: &str) -> Result<Term, String> {
    let mut cur = Cursor::new(text.trim());
    let term = cur.object()?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err("trailing characters after term".into());
    }
    Ok(term)
}

fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = cur.subject()?;
    cur.require_ws("after subject")?;
    let predicate = cur.iri().map_err(|e| format!("predicate: {e}"))?;
    cur.require_ws("after predicate")?;
    let object = cur.object()?;
    cur.skip_ws();
    if cur.bump() != Some('.') {
        return Err("expected `.` terminating the statement".into());
    }
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') => Ok(Some(Triple::new(subject, predicate, object))),
        Some(c) => Err(format!("unexpected {c:?} after `.`")),
    }
}

struct Cursor<'a> {
    chars: Peekable<CharIndices<'a>>,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.char_indices().peekable(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        self.chars.next().map(|(_, c)| c)
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.bump();
        }
    }

    fn require_ws(&mut self, ctx: &str) -> Result<(), String> {
        if !matches!(self.peek(), Some(' ' | '\t')) {
            // `<a><b><c> .` is legal N-Triples; only IRIs may abut.
            if self.peek() != Some('<') && self.peek() != Some('"') {
                return Err(format!("expected whitespace {ctx}"));
            }
        }
        self.skip_ws();
        Ok(())
    }

    fn subject(&mut self) -> Result<Iri, String> {
        match self.peek() {
            Some('<') => self.iri().map_err(|e| format!("subject: {e}")),
            Some('_') => Err("blank nodes are not supported".into()),
            Some('"') => Err("literal in subject position".into()),
            Some(c) => Err(format!("unexpected {c:?} at start of subject")),
            None => Err("missing subject".into()),
        }
    }

    fn object(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri().map_err(|e| format!("object: {e}"))?)),
            Some('"') => Ok(Term::Literal(self.literal()?)),
            Some('_') => Err("blank nodes are not supported".into()),
            Some(c) => Err(format!("unexpected {c:?} at start of object")),
            None => Err("missing object".into()),
        }
    }

    fn iri(&mut self) -> Result<Iri, String> {
        if self.bump() != Some('<') {
            return Err("expected `<`".into());
        }
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        _ => return Err("invalid escape in IRI".into()),
                    };
                    text.push(c);
                }
                Some(c) if is_forbidden_iri_char(c) => return Err(format!("character {c:?} not allowed in IRI")),
                Some(c) => text.push(c),
            }
        }
        Iri::new(text).map_err(|e| e.to_string())
    }

    fn literal(&mut self) -> Result<Literal, String> {
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated string literal".into()),
                Some('"') => break,
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
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        Some(c) => return Err(format!("invalid escape `\\{c}`")),
                        None => return Err("unterminated escape".into()),
                    };
                    lexical.push(c);
                }
                Some('\n' | '\r') => return Err("raw line break in literal".into()),
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err("expected `^^` before datatype".into());
                }
                let dt = self.iri().map_err(|e| format!("datatype: {e}"))?;
                Ok(Literal::typed(lexical, dt))
            }
            Some('@') => Err("language-tagged literals are not supported".into()),
            _ => Ok(Literal::simple(lexical)),
        }
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, String> {
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or("invalid hex digit in escape")?;
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| format!("invalid code point U+{value:X}"))
    }
}
