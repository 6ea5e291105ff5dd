//! The instance file format.
//!
//! ```text
//! # comments run to the end of the line
//! group cyclic 4
//! quiver Q
//!   vertex 1
//!   arrow a : 1 -> 2
//! end
//! global rot on Q
//!   act t vertex 1 -> 2
//!   act t arrow a -> b
//! end
//! partial P on Q
//!   domain t vertices {2, 3} arrows {b}
//!   map t a -> b
//! end
//! restrict rot to vertices {1, 2, 3} arrows {a, b}
//! truncate 3
//! ```
//!
//! A group given by its table is a block:
//!
//! ```text
//! group table V4
//!   elements e x y z
//!   x : x e z y
//!   ...
//! end
//! ```
//!
//! Identifiers are bare words or double-quoted strings (`"(e, v1)"`, with
//! `\"` and `\\` escapes). Names must be declared before they are used.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use paction_core::quiver_paction::PartialIso;
use paction_core::{
    Arrow, FiniteGroup, GlobalQuiverAction, Quiver, QuiverMorphism, QuiverPartialAction, Subquiver,
};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("no subject: the file declares no quiver, action or restriction")]
    NoSubject,
    #[error("{0}")]
    Build(String),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> DocumentError {
    DocumentError::Syntax { line, column, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Table { name: String, elements: Vec<String>, rows: Vec<(String, Vec<String>)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Vertex,
    Arrow,
}

impl Kind {
    fn keyword(self) -> &'static str {
        match self {
            Kind::Vertex => "vertex",
            Kind::Arrow => "arrow",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverBlock {
    pub name: String,
    pub vertices: Vec<String>,
    /// `(id, source, target)`.
    pub arrows: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Act {
    pub element: String,
    pub kind: Kind,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalBlock {
    pub name: String,
    pub quiver: String,
    pub acts: Vec<Act>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainLine {
    pub element: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapLine {
    pub element: String,
    /// `None` when the kind was left to name resolution.
    pub kind: Option<Kind>,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialBlock {
    pub name: String,
    pub quiver: String,
    pub domains: Vec<DomainLine>,
    pub maps: Vec<MapLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictLine {
    pub global: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceDocument {
    pub group: Option<GroupSpec>,
    pub quivers: Vec<QuiverBlock>,
    pub globals: Vec<GlobalBlock>,
    pub partials: Vec<PartialBlock>,
    pub restricts: Vec<RestrictLine>,
    pub truncate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    LBrace,
    RBrace,
    Comma,
    Colon,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Arrow => write!(f, "`->`"),
        }
    }
}

fn is_bare(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '{' | '}' | ',' | ':' | '"' | '#')
}

fn tokenize(text: &str, line: usize) -> Result<Vec<(usize, Tok)>, DocumentError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '{' | '}' | ',' | ':' => {
                out.push((
                    col,
                    match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        ',' => Tok::Comma,
                        _ => Tok::Colon,
                    },
                ));
                i += 1;
            }
            '"' => {
                let mut word = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(syntax(line, col, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some(&e @ ('"' | '\\')) => word.push(e),
                                _ => return Err(syntax(line, i + 1, "unknown escape")),
                            }
                            i += 2;
                        }
                        Some(&ch) => {
                            word.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push((col, Tok::Word(word)));
            }
            _ => {
                let start = i;
                while i < chars.len() && is_bare(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push((col, if word == "->" { Tok::Arrow } else { Tok::Word(word) }));
            }
        }
    }
    Ok(out)
}

/// Cursor over the tokens of one line.
struct Line {
    number: usize,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
}

impl Line {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.0)
    }

    fn err(&self, message: impl Into<String>) -> DocumentError {
        syntax(self.number, self.col(), message)
    }

    fn err_at(&self, pos: usize, message: impl Into<String>) -> DocumentError {
        syntax(self.number, self.toks.get(pos).map_or(self.end_col, |t| t.0), message)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn word(&mut self, what: &str) -> Result<String, DocumentError> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Word(w))) => {
                self.pos += 1;
                Ok(w.clone())
            }
            Some((_, t)) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DocumentError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected `{kw}`, found {t}"))),
            None => Err(self.err(format!("expected `{kw}`"))),
        }
    }

    fn token(&mut self, tok: Tok) -> Result<(), DocumentError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {tok}, found {t}"))),
            None => Err(self.err(format!("expected {tok}"))),
        }
    }

    fn finish(&self) -> Result<(), DocumentError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected {t}"))),
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, DocumentError> {
        let pos = self.pos;
        let w = self.word(what)?;
        w.parse().map_err(|_| self.err_at(pos, format!("expected {what}, found `{w}`")))
    }

    /// `{a, b, c}`; positions of the words are returned alongside.
    fn set(&mut self) -> Result<Vec<(usize, String)>, DocumentError> {
        self.token(Tok::LBrace)?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let pos = self.pos;
            out.push((pos, self.word("a name")?));
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(t) => return Err(self.err(format!("expected `,` or `}}`, found {t}"))),
                None => return Err(self.err("unclosed `{`")),
            }
        }
    }

    fn kind(&mut self) -> Result<Kind, DocumentError> {
        let pos = self.pos;
        match self.word("`vertex` or `arrow`")?.as_str() {
            "vertex" => Ok(Kind::Vertex),
            "arrow" => Ok(Kind::Arrow),
            other => Err(self.err_at(pos, format!("expected `vertex` or `arrow`, found `{other}`"))),
        }
    }
}

enum Open {
    Group { line: usize, name: String, elements: Option<Vec<String>>, rows: Vec<(String, Vec<String>)> },
    Quiver(usize, QuiverBlock),
    Global(usize, GlobalBlock),
    Partial(usize, PartialBlock),
}

struct Parser {
    doc: InstanceDocument,
    elements: Option<BTreeSet<String>>,
}

impl Parser {
    fn quiver(&self, name: &str) -> Option<&QuiverBlock> {
        self.doc.quivers.iter().find(|q| q.name == name)
    }

    fn taken(&self, name: &str) -> bool {
        self.doc.quivers.iter().any(|q| q.name == name)
            || self.doc.globals.iter().any(|g| g.name == name)
            || self.doc.partials.iter().any(|p| p.name == name)
    }

    fn element(&self, l: &Line, pos: usize, name: &str) -> Result<(), DocumentError> {
        match &self.elements {
            None => Err(l.err_at(pos, "no group declared before this line")),
            Some(e) if e.contains(name) => Ok(()),
            Some(_) => Err(l.err_at(pos, format!("unknown group element `{name}`"))),
        }
    }

    fn new_block_name(&self, l: &Line, pos: usize, name: &str) -> Result<(), DocumentError> {
        if self.taken(name) {
            Err(l.err_at(pos, format!("duplicate name `{name}`")))
        } else {
            Ok(())
        }
    }

    fn top(&mut self, l: &mut Line) -> Result<Option<Open>, DocumentError> {
        let kw_pos = l.pos;
        let kw = l.word("a keyword")?;
        match kw.as_str() {
            "group" => {
                if self.doc.group.is_some() {
                    return Err(l.err_at(kw_pos, "a second group declaration"));
                }
                let form_pos = l.pos;
                match l.word("`cyclic` or `table`")?.as_str() {
                    "cyclic" => {
                        let n_pos = l.pos;
                        let n = l.number("the group order")?;
                        l.finish()?;
                        let g = FiniteGroup::cyclic(n).map_err(|e| l.err_at(n_pos, e.to_string()))?;
                        self.elements = Some(g.names().iter().cloned().collect());
                        self.doc.group = Some(GroupSpec::Cyclic(n));
                        Ok(None)
                    }
                    "table" => {
                        let name = l.word("a group name")?;
                        l.finish()?;
                        Ok(Some(Open::Group { line: l.number, name, elements: None, rows: Vec::new() }))
                    }
                    other => Err(l.err_at(form_pos, format!("expected `cyclic` or `table`, found `{other}`"))),
                }
            }
            "quiver" => {
                let pos = l.pos;
                let name = l.word("a quiver name")?;
                l.finish()?;
                self.new_block_name(l, pos, &name)?;
                Ok(Some(Open::Quiver(l.number, QuiverBlock { name, vertices: Vec::new(), arrows: Vec::new() })))
            }
            "global" | "partial" => {
                let pos = l.pos;
                let name = l.word("a name")?;
                l.keyword("on")?;
                let qpos = l.pos;
                let quiver = l.word("a quiver name")?;
                l.finish()?;
                self.new_block_name(l, pos, &name)?;
                if self.quiver(&quiver).is_none() {
                    return Err(l.err_at(qpos, format!("unknown quiver `{quiver}`")));
                }
                if self.elements.is_none() {
                    return Err(l.err_at(kw_pos, "no group declared before this line"));
                }
                Ok(Some(if kw == "global" {
                    Open::Global(l.number, GlobalBlock { name, quiver, acts: Vec::new() })
                } else {
                    Open::Partial(l.number, PartialBlock { name, quiver, domains: Vec::new(), maps: Vec::new() })
                }))
            }
            "restrict" => {
                let pos = l.pos;
                let global = l.word("a global action name")?;
                let Some(block) = self.doc.globals.iter().find(|g| g.name == global) else {
                    return Err(l.err_at(pos, format!("unknown global action `{global}`")));
                };
                let q = self.quiver(&block.quiver).expect("resolved when the block was read").clone();
                l.keyword("to")?;
                l.keyword("vertices")?;
                let vertices = l.named_set(&q.vertices, "vertex")?;
                l.keyword("arrows")?;
                let arrow_ids: Vec<String> = q.arrows.iter().map(|a| a.0.clone()).collect();
                let arrows = l.named_set(&arrow_ids, "arrow")?;
                l.finish()?;
                self.doc.restricts.push(RestrictLine { global, vertices, arrows });
                Ok(None)
            }
            "truncate" => {
                if self.doc.truncate.is_some() {
                    return Err(l.err_at(kw_pos, "a second truncate line"));
                }
                self.doc.truncate = Some(l.number("a truncation length")?);
                l.finish()?;
                Ok(None)
            }
            "end" => Err(l.err_at(kw_pos, "`end` outside a block")),
            other => Err(l.err_at(kw_pos, format!("unknown keyword `{other}`"))),
        }
    }

    fn inside(&mut self, open: &mut Open, l: &mut Line) -> Result<(), DocumentError> {
        let kw_pos = l.pos;
        match open {
            Open::Group { elements, rows, .. } => {
                if l.peek() == Some(&Tok::Word("elements".into())) && elements.is_none() {
                    l.pos += 1;
                    let mut names = Vec::new();
                    while l.peek().is_some() {
                        let pos = l.pos;
                        let n = l.word("an element name")?;
                        if names.contains(&n) {
                            return Err(l.err_at(pos, format!("duplicate element `{n}`")));
                        }
                        names.push(n);
                    }
                    if names.is_empty() {
                        return Err(l.err("expected element names"));
                    }
                    *elements = Some(names);
                    return Ok(());
                }
                let Some(names) = elements.as_ref() else {
                    return Err(l.err("expected `elements` before table rows"));
                };
                let x = l.word("an element name")?;
                if !names.contains(&x) {
                    return Err(l.err_at(kw_pos, format!("unknown element `{x}`")));
                }
                if rows.iter().any(|r| r.0 == x) {
                    return Err(l.err_at(kw_pos, format!("second row for `{x}`")));
                }
                l.token(Tok::Colon)?;
                let mut row = Vec::new();
                while l.peek().is_some() {
                    let pos = l.pos;
                    let y = l.word("an element name")?;
                    if !names.contains(&y) {
                        return Err(l.err_at(pos, format!("unknown element `{y}`")));
                    }
                    row.push(y);
                }
                if row.len() != names.len() {
                    return Err(l.err(format!("row has {} entries, expected {}", row.len(), names.len())));
                }
                rows.push((x, row));
                Ok(())
            }
            Open::Quiver(_, q) => match l.word("`vertex`, `arrow` or `end`")?.as_str() {
                "vertex" => {
                    let pos = l.pos;
                    let v = l.word("a vertex id")?;
                    l.finish()?;
                    if q.vertices.contains(&v) {
                        return Err(l.err_at(pos, format!("duplicate vertex `{v}`")));
                    }
                    q.vertices.push(v);
                    Ok(())
                }
                "arrow" => {
                    let pos = l.pos;
                    let id = l.word("an arrow id")?;
                    if q.arrows.iter().any(|a| a.0 == id) {
                        return Err(l.err_at(pos, format!("duplicate arrow `{id}`")));
                    }
                    l.token(Tok::Colon)?;
                    let spos = l.pos;
                    let s = l.word("a source vertex")?;
                    l.token(Tok::Arrow)?;
                    let tpos = l.pos;
                    let t = l.word("a target vertex")?;
                    l.finish()?;
                    for (p, v) in [(spos, &s), (tpos, &t)] {
                        if !q.vertices.contains(v) {
                            return Err(l.err_at(p, format!("unknown vertex `{v}`")));
                        }
                    }
                    q.arrows.push((id, s, t));
                    Ok(())
                }
                other => Err(l.err_at(kw_pos, format!("unknown quiver line `{other}`"))),
            },
            Open::Global(_, g) => {
                l.keyword("act")?;
                let epos = l.pos;
                let element = l.word("a group element")?;
                self.element(l, epos, &element)?;
                let kind = l.kind()?;
                let q = self.quiver(&g.quiver).expect("resolved");
                let (from, to) = mapping(l, q, kind)?;
                if g.acts.iter().any(|a| a.element == element && a.kind == kind && a.from == from) {
                    return Err(l.err_at(kw_pos, format!("second image of `{from}` under `{element}`")));
                }
                g.acts.push(Act { element, kind, from, to });
                Ok(())
            }
            Open::Partial(_, p) => {
                let q = self.quiver(&p.quiver).expect("resolved").clone();
                match l.word("`domain`, `map` or `end`")?.as_str() {
                    "domain" => {
                        let epos = l.pos;
                        let element = l.word("a group element")?;
                        self.element(l, epos, &element)?;
                        if p.domains.iter().any(|d| d.element == element) {
                            return Err(l.err_at(epos, format!("second domain for `{element}`")));
                        }
                        l.keyword("vertices")?;
                        let vertices = l.named_set(&q.vertices, "vertex")?;
                        let arrows = if l.peek().is_some() {
                            l.keyword("arrows")?;
                            let ids: Vec<String> = q.arrows.iter().map(|a| a.0.clone()).collect();
                            l.named_set(&ids, "arrow")?
                        } else {
                            Vec::new()
                        };
                        l.finish()?;
                        p.domains.push(DomainLine { element, vertices, arrows });
                        Ok(())
                    }
                    "map" => {
                        let epos = l.pos;
                        let element = l.word("a group element")?;
                        self.element(l, epos, &element)?;
                        let explicit = matches!(l.peek(), Some(Tok::Word(w)) if w == "vertex" || w == "arrow")
                            && l.toks.get(l.pos + 1).is_some_and(|t| t.1 != Tok::Arrow);
                        let kind = if explicit {
                            Some(l.kind()?)
                        } else {
                            None
                        };
                        let fpos = l.pos;
                        let resolved = match kind {
                            Some(k) => k,
                            None => {
                                let name = match l.peek() {
                                    Some(Tok::Word(w)) => w.clone(),
                                    _ => return Err(l.err("expected a vertex or arrow name")),
                                };
                                let is_v = q.vertices.contains(&name);
                                let is_a = q.arrows.iter().any(|a| a.0 == name);
                                match (is_v, is_a) {
                                    (true, true) => {
                                        return Err(l.err_at(
                                            fpos,
                                            format!("`{name}` names a vertex and an arrow; write `vertex` or `arrow`"),
                                        ))
                                    }
                                    (true, false) => Kind::Vertex,
                                    (false, true) => Kind::Arrow,
                                    (false, false) => {
                                        return Err(l.err_at(fpos, format!("unknown vertex or arrow `{name}`")))
                                    }
                                }
                            }
                        };
                        let (from, to) = mapping(l, &q, resolved)?;
                        if p.maps.iter().any(|m| {
                            m.element == element && m.from == from && m.kind.unwrap_or(resolved) == resolved
                        }) {
                            return Err(l.err_at(fpos, format!("second image of `{from}` under `{element}`")));
                        }
                        p.maps.push(MapLine { element, kind, from, to });
                        Ok(())
                    }
                    other => Err(l.err_at(kw_pos, format!("unknown partial action line `{other}`"))),
                }
            }
        }
    }

    fn close(&mut self, open: Open, l: &Line) -> Result<(), DocumentError> {
        match open {
            Open::Group { name, elements, rows, .. } => {
                let Some(elements) = elements else {
                    return Err(l.err("group table without `elements`"));
                };
                if rows.len() != elements.len() {
                    return Err(l.err(format!("group table has {} rows, expected {}", rows.len(), elements.len())));
                }
                self.elements = Some(elements.iter().cloned().collect());
                self.doc.group = Some(GroupSpec::Table { name, elements, rows });
            }
            Open::Quiver(_, q) => self.doc.quivers.push(q),
            Open::Global(_, g) => self.doc.globals.push(g),
            Open::Partial(_, p) => self.doc.partials.push(p),
        }
        Ok(())
    }
}

fn mapping(l: &mut Line, q: &QuiverBlock, kind: Kind) -> Result<(String, String), DocumentError> {
    let fpos = l.pos;
    let from = l.word("a name")?;
    l.token(Tok::Arrow)?;
    let tpos = l.pos;
    let to = l.word("a name")?;
    l.finish()?;
    for (p, n) in [(fpos, &from), (tpos, &to)] {
        let known = match kind {
            Kind::Vertex => q.vertices.contains(n),
            Kind::Arrow => q.arrows.iter().any(|a| &a.0 == n),
        };
        if !known {
            return Err(l.err_at(p, format!("unknown {} `{n}`", kind.keyword())));
        }
    }
    Ok((from, to))
}

impl Line {
    /// A set of names, each of which must be in `known`.
    fn named_set(&mut self, known: &[String], what: &str) -> Result<Vec<String>, DocumentError> {
        let mut out: Vec<String> = Vec::new();
        for (pos, n) in self.set()? {
            if !known.contains(&n) {
                return Err(self.err_at(pos, format!("unknown {what} `{n}`")));
            }
            if out.contains(&n) {
                return Err(self.err_at(pos, format!("duplicate {what} `{n}`")));
            }
            out.push(n);
        }
        Ok(out)
    }
}

/// Parses an instance file. Every name is resolved while reading, so the
/// result refers only to declared objects.
pub fn parse_instance(text: &str) -> Result<InstanceDocument, DocumentError> {
    let mut p = Parser { doc: InstanceDocument::default(), elements: None };
    let mut open: Option<Open> = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        last_line = number;
        let toks = tokenize(raw, number)?;
        if toks.is_empty() {
            continue;
        }
        let mut l = Line { number, toks, pos: 0, end_col: raw.chars().count() + 1 };
        if l.peek() == Some(&Tok::Word("end".into())) && open.is_some() {
            l.pos += 1;
            l.finish()?;
            let block = open.take().expect("checked");
            p.close(block, &l)?;
            continue;
        }
        match open.as_mut() {
            Some(block) => p.inside(block, &mut l)?,
            None => open = p.top(&mut l)?,
        }
    }
    if let Some(block) = open {
        let (line, what) = match block {
            Open::Group { line, .. } => (line, "group"),
            Open::Quiver(line, _) => (line, "quiver"),
            Open::Global(line, _) => (line, "global"),
            Open::Partial(line, _) => (line, "partial"),
        };
        return Err(syntax(last_line.max(line), 1, format!("{what} block opened on line {line} is not closed")));
    }
    let d = &p.doc;
    if d.quivers.is_empty() && d.globals.is_empty() && d.partials.is_empty() && d.restricts.is_empty() {
        return Err(DocumentError::NoSubject);
    }
    Ok(p.doc)
}

/// Writes a name so that [`parse_instance`] reads it back unchanged.
pub fn quote(name: &str) -> String {
    if !name.is_empty() && name != "->" && name.chars().all(is_bare) {
        name.to_string()
    } else {
        let escaped = name.replace('\\', "\\\\").replace('"', "\\\"");
        format!("\"{escaped}\"")
    }
}

fn set(names: &[String]) -> String {
    let inner: Vec<String> = names.iter().map(|n| quote(n)).collect();
    format!("{{{}}}", inner.join(", "))
}

/// Writes a document in the instance format; parsing the output gives back
/// an equal document.
pub fn serialize(doc: &InstanceDocument) -> String {
    let mut out = String::new();
    match &doc.group {
        None => {}
        Some(GroupSpec::Cyclic(n)) => writeln!(out, "group cyclic {n}").unwrap(),
        Some(GroupSpec::Table { name, elements, rows }) => {
            writeln!(out, "group table {}", quote(name)).unwrap();
            let names: Vec<String> = elements.iter().map(|e| quote(e)).collect();
            writeln!(out, "  elements {}", names.join(" ")).unwrap();
            for (x, row) in rows {
                let row: Vec<String> = row.iter().map(|e| quote(e)).collect();
                writeln!(out, "  {} : {}", quote(x), row.join(" ")).unwrap();
            }
            writeln!(out, "end").unwrap();
        }
    }
    for q in &doc.quivers {
        writeln!(out, "quiver {}", quote(&q.name)).unwrap();
        for v in &q.vertices {
            writeln!(out, "  vertex {}", quote(v)).unwrap();
        }
        for (id, s, t) in &q.arrows {
            writeln!(out, "  arrow {} : {} -> {}", quote(id), quote(s), quote(t)).unwrap();
        }
        writeln!(out, "end").unwrap();
    }
    for g in &doc.globals {
        writeln!(out, "global {} on {}", quote(&g.name), quote(&g.quiver)).unwrap();
        for a in &g.acts {
            writeln!(out, "  act {} {} {} -> {}", quote(&a.element), a.kind.keyword(), quote(&a.from), quote(&a.to))
                .unwrap();
        }
        writeln!(out, "end").unwrap();
    }
    for p in &doc.partials {
        writeln!(out, "partial {} on {}", quote(&p.name), quote(&p.quiver)).unwrap();
        for d in &p.domains {
            writeln!(out, "  domain {} vertices {} arrows {}", quote(&d.element), set(&d.vertices), set(&d.arrows))
                .unwrap();
        }
        for m in &p.maps {
            let kind = m.kind.map_or(String::new(), |k| format!("{} ", k.keyword()));
            writeln!(out, "  map {} {kind}{} -> {}", quote(&m.element), quote(&m.from), quote(&m.to)).unwrap();
        }
        writeln!(out, "end").unwrap();
    }
    for r in &doc.restricts {
        writeln!(out, "restrict {} to vertices {} arrows {}", quote(&r.global), set(&r.vertices), set(&r.arrows))
            .unwrap();
    }
    if let Some(l) = doc.truncate {
        writeln!(out, "truncate {l}").unwrap();
    }
    out
}

fn build(msg: impl fmt::Display) -> DocumentError {
    DocumentError::Build(msg.to_string())
}

/// Core objects built from a document.
pub struct Resolved<'d> {
    doc: &'d InstanceDocument,
    group: Option<Arc<FiniteGroup>>,
    quivers: BTreeMap<String, Arc<Quiver>>,
}

impl<'d> Resolved<'d> {
    pub fn new(doc: &'d InstanceDocument) -> Result<Self, DocumentError> {
        let group = match &doc.group {
            None => None,
            Some(GroupSpec::Cyclic(n)) => Some(FiniteGroup::cyclic(*n).map_err(build)?),
            Some(GroupSpec::Table { elements, rows, .. }) => {
                let pos = |x: &String| elements.iter().position(|e| e == x).expect("resolved");
                let mut mul = vec![Vec::new(); elements.len()];
                for (x, row) in rows {
                    mul[pos(x)] = row.iter().map(pos).collect();
                }
                Some(FiniteGroup::from_cayley_table(elements.clone(), mul).map_err(build)?)
            }
        };
        let mut quivers = BTreeMap::new();
        for q in &doc.quivers {
            let arrows = q.arrows.iter().map(|(id, s, t)| Arrow::new(id, s, t)).collect();
            let built = Quiver::new(q.vertices.clone(), arrows).map_err(build)?;
            quivers.insert(q.name.clone(), Arc::new(built));
        }
        Ok(Resolved { doc, group: group.map(Arc::new), quivers })
    }

    pub fn group(&self) -> Result<&Arc<FiniteGroup>, DocumentError> {
        self.group.as_ref().ok_or_else(|| build("no group declared"))
    }

    pub fn quiver(&self, name: &str) -> Result<&Arc<Quiver>, DocumentError> {
        self.quivers.get(name).ok_or_else(|| build(format!("unknown quiver `{name}`")))
    }

    /// The generator images of a global block as automorphisms.
    pub fn generators(&self, name: &str) -> Result<Vec<(paction_core::Elem, QuiverMorphism)>, DocumentError> {
        let block = self.doc.globals.iter().find(|g| g.name == name).ok_or_else(|| build(format!("unknown global `{name}`")))?;
        let g_ = self.group()?;
        let q = self.quiver(&block.quiver)?;
        let mut order: Vec<&str> = Vec::new();
        for a in &block.acts {
            if !order.contains(&a.element.as_str()) {
                order.push(&a.element);
            }
        }
        let mut out = Vec::new();
        for element in order {
            let acts: Vec<&Act> = block.acts.iter().filter(|a| a.element == element).collect();
            let pairs = |kind: Kind| -> Vec<(&str, &str)> {
                acts.iter().filter(|a| a.kind == kind).map(|a| (a.from.as_str(), a.to.as_str())).collect()
            };
            let (vp, ap) = (pairs(Kind::Vertex), pairs(Kind::Arrow));
            if let Some(v) = q.vertex_names().iter().find(|v| !vp.iter().any(|p| p.0 == v.as_str())) {
                return Err(build(format!("global `{name}`: no image of vertex `{v}` under `{element}`")));
            }
            if let Some(x) = q.arrow_names().iter().find(|x| !ap.iter().any(|p| p.0 == x.as_str())) {
                return Err(build(format!("global `{name}`: no image of arrow `{x}` under `{element}`")));
            }
            let m = QuiverMorphism::from_names(q.clone(), q.clone(), &vp, &ap)
                .map_err(|e| build(format!("global `{name}`, element `{element}`: {e}")))?;
            out.push((g_.element(element).map_err(build)?, m));
        }
        Ok(out)
    }

    pub fn global(&self, name: &str) -> Result<GlobalQuiverAction, DocumentError> {
        let block = self.doc.globals.iter().find(|g| g.name == name).ok_or_else(|| build(format!("unknown global `{name}`")))?;
        let generators = self.generators(name)?;
        GlobalQuiverAction::from_generators(self.group()?.clone(), self.quiver(&block.quiver)?.clone(), &generators)
            .map_err(|e| build(format!("global `{name}`: {e}")))
    }

    pub fn partial(&self, block: &PartialBlock) -> Result<QuiverPartialAction, DocumentError> {
        let g_ = self.group()?;
        let q = self.quiver(&block.quiver)?;
        let mut a = QuiverPartialAction::new(g_.clone(), q.clone());
        // `e` starts as the identity; listing maps for it replaces that
        let e = g_.identity();
        if block.maps.iter().any(|m| m.element == g_.name(e)) {
            a.set_map(e, PartialIso::default());
        }
        for d in &block.domains {
            let g = g_.element(&d.element).map_err(build)?;
            let v: Vec<&str> = d.vertices.iter().map(String::as_str).collect();
            let x: Vec<&str> = d.arrows.iter().map(String::as_str).collect();
            a.set_domain(g, Subquiver::from_names(q, &v, &x).map_err(build)?);
        }
        for m in &block.maps {
            let g = g_.element(&m.element).map_err(build)?;
            let kind = m.kind.unwrap_or(if q.vertex(&m.from).is_ok() { Kind::Vertex } else { Kind::Arrow });
            match kind {
                Kind::Vertex => a.set_vertex_map(g, q.vertex(&m.from).map_err(build)?, q.vertex(&m.to).map_err(build)?),
                Kind::Arrow => a.set_arrow_map(g, q.arrow(&m.from).map_err(build)?, q.arrow(&m.to).map_err(build)?),
            }
        }
        Ok(a)
    }

    pub fn restriction(&self, r: &RestrictLine) -> Result<(GlobalQuiverAction, Subquiver), DocumentError> {
        let b = self.global(&r.global)?;
        let v: Vec<&str> = r.vertices.iter().map(String::as_str).collect();
        let x: Vec<&str> = r.arrows.iter().map(String::as_str).collect();
        let s = Subquiver::from_names(b.quiver(), &v, &x).map_err(build)?;
        Ok((b, s))
    }
}

/// A document describing a partial action: its group, its quiver and one
/// partial block listing every nonempty domain and every map entry.
pub fn document_of_partial(
    group: GroupSpec,
    quiver_name: &str,
    action_name: &str,
    a: &QuiverPartialAction,
) -> InstanceDocument {
    let q = a.quiver();
    let g_ = a.group();
    let quiver = QuiverBlock {
        name: quiver_name.to_string(),
        vertices: q.vertex_names().to_vec(),
        arrows: q.arrow_records().into_iter().map(|r| (r.id, r.source, r.target)).collect(),
    };
    let mut domains = Vec::new();
    let mut maps = Vec::new();
    for g in g_.elements().filter(|&g| g != g_.identity()) {
        let d = a.domain(g);
        let name = g_.name(g).to_string();
        domains.push(DomainLine {
            element: name.clone(),
            vertices: d.vertex_names(q).into_iter().map(String::from).collect(),
            arrows: d.arrow_names(q).into_iter().map(String::from).collect(),
        });
        let m = a.map(g);
        for (&x, &y) in &m.vertices {
            maps.push(MapLine {
                element: name.clone(),
                kind: Some(Kind::Vertex),
                from: q.vertex_name(x).into(),
                to: q.vertex_name(y).into(),
            });
        }
        for (&x, &y) in &m.arrows {
            maps.push(MapLine {
                element: name.clone(),
                kind: Some(Kind::Arrow),
                from: q.arrow_name(x).into(),
                to: q.arrow_name(y).into(),
            });
        }
    }
    InstanceDocument {
        group: Some(group),
        quivers: vec![quiver],
        partials: vec![PartialBlock {
            name: action_name.to_string(),
            quiver: quiver_name.to_string(),
            domains,
            maps,
        }],
        ..InstanceDocument::default()
    }
}

/// A document describing a global action through the images of every
/// non-identity element.
pub fn document_of_global(group: GroupSpec, quiver_name: &str, action_name: &str, b: &GlobalQuiverAction) -> InstanceDocument {
    let q = b.quiver();
    let g_ = b.group();
    let quiver = QuiverBlock {
        name: quiver_name.to_string(),
        vertices: q.vertex_names().to_vec(),
        arrows: q.arrow_records().into_iter().map(|r| (r.id, r.source, r.target)).collect(),
    };
    let mut acts = Vec::new();
    for g in g_.elements().filter(|&g| g != g_.identity()) {
        for v in 0..q.vertex_count() {
            acts.push(Act {
                element: g_.name(g).into(),
                kind: Kind::Vertex,
                from: q.vertex_name(v).into(),
                to: q.vertex_name(b.vertex(g, v)).into(),
            });
        }
        for x in 0..q.arrow_count() {
            acts.push(Act {
                element: g_.name(g).into(),
                kind: Kind::Arrow,
                from: q.arrow_name(x).into(),
                to: q.arrow_name(b.arrow(g, x)).into(),
            });
        }
    }
    InstanceDocument {
        group: Some(group),
        quivers: vec![quiver],
        globals: vec![GlobalBlock { name: action_name.to_string(), quiver: quiver_name.to_string(), acts }],
        ..InstanceDocument::default()
    }
}
