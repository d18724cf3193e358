#![allow(dead_code)]

use std::collections::HashSet;

use mono31::{parse_dimacs, Formula};

pub const SMALL: &str = "c three colors, three positive clauses
p cnf 9 6
-1 -2 -3 0
-4 -5 -6 0
-7 -8 -9 0
1 3 8 0
1 4 7 0
7 8 9 0
";

pub fn small() -> Formula {
    parse_dimacs(SMALL).unwrap()
}

/// All 27 triples drawn one from each of {1,2,3}, {7,8,9}, {4,5,6}.
pub fn dense() -> Formula {
    let mut positives = Vec::new();
    for r in [4, 5, 6] {
        for b in [1, 2, 3] {
            for g in [7, 8, 9] {
                positives.push([b, g, r]);
            }
        }
    }
    Formula::from_triples(9, &[[1, 2, 3], [4, 5, 6], [7, 8, 9]], &positives).unwrap()
}

#[derive(Debug, PartialEq, Eq)]
enum Tok {
    Id(String),
    Str(String),
    Arrow,
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let mut it = src.chars().peekable();
    while let Some(c) = it.next() {
        match c {
            c if c.is_whitespace() => {}
            '/' if it.peek() == Some(&'/') => {
                for c in it.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '-' if it.peek() == Some(&'>') => {
                it.next();
                toks.push(Tok::Arrow);
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match it.next() {
                        Some('"') => break,
                        Some('\\') => s.push(it.next().ok_or("dangling escape")?),
                        Some(c) => s.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                toks.push(Tok::Str(s));
            }
            '{' | '}' | '[' | ']' | '=' | ';' | ',' => toks.push(Tok::Sym(c)),
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::from(c);
                while let Some(&n) = it.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' || n == '.' {
                        s.push(n);
                        it.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Id(s));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(toks)
}

type Attrs = Vec<(String, String)>;

/// Parsed shape of a DOT digraph: declared nodes and edges.
#[derive(Debug, Default)]
pub struct Dot {
    pub nodes: Vec<(String, Attrs)>,
    pub edges: Vec<(String, String, Attrs)>,
}

impl Dot {
    pub fn attr<'a>(attrs: &'a [(String, String)], key: &str) -> Option<&'a str> {
        attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Checks `digraph ID { stmt* }` where each statement is a node, an edge
/// or a `node [...]` default, each optionally followed by `;`. Edge
/// endpoints must be declared nodes.
pub fn parse_dot(src: &str) -> Result<Dot, String> {
    let toks = lex(src)?;
    let mut p = 0;
    let mut next = || {
        let t = toks.get(p);
        p += 1;
        t
    };
    match (next(), next(), next()) {
        (Some(Tok::Id(d)), Some(Tok::Id(_)), Some(Tok::Sym('{'))) if d == "digraph" => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    let mut dot = Dot::default();
    let mut declared = HashSet::new();
    loop {
        let id = match toks.get(p) {
            Some(Tok::Sym('}')) => {
                p += 1;
                break;
            }
            Some(Tok::Id(id)) => id.clone(),
            other => return Err(format!("expected statement, got {other:?}")),
        };
        p += 1;
        let mut target = None;
        if toks.get(p) == Some(&Tok::Arrow) {
            match toks.get(p + 1) {
                Some(Tok::Id(t)) => target = Some(t.clone()),
                other => return Err(format!("bad edge target {other:?}")),
            }
            p += 2;
        }
        let mut attrs = Vec::new();
        if toks.get(p) == Some(&Tok::Sym('[')) {
            p += 1;
            loop {
                match toks.get(p) {
                    Some(Tok::Sym(']')) => {
                        p += 1;
                        break;
                    }
                    Some(Tok::Id(k)) => {
                        let value = match (toks.get(p + 1), toks.get(p + 2)) {
                            (Some(Tok::Sym('=')), Some(Tok::Id(v) | Tok::Str(v))) => v.clone(),
                            other => return Err(format!("bad attribute {k}: {other:?}")),
                        };
                        attrs.push((k.clone(), value));
                        p += 3;
                        if toks.get(p) == Some(&Tok::Sym(',')) {
                            p += 1;
                        }
                    }
                    other => return Err(format!("bad attribute list at {other:?}")),
                }
            }
        }
        if toks.get(p) == Some(&Tok::Sym(';')) {
            p += 1;
        }
        match target {
            Some(t) => {
                for end in [&id, &t] {
                    if !declared.contains(end) {
                        return Err(format!("edge endpoint {end} not declared"));
                    }
                }
                dot.edges.push((id, t, attrs));
            }
            None if id == "node" => {}
            None => {
                declared.insert(id.clone());
                dot.nodes.push((id, attrs));
            }
        }
    }
    if p != toks.len() {
        return Err("trailing tokens".into());
    }
    Ok(dot)
}
