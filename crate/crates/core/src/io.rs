//! The line-oriented quiver file format.

use crate::error::{Error, Result};
use crate::quiver::{Arrow, FringedQuiver, GentleQuiver};

#[derive(Debug, Clone)]
pub enum QuiverFile {
    Base(GentleQuiver),
    Fringed(Box<FringedQuiver>),
}

impl QuiverFile {
    /// The fringed quiver, fringing a base quiver first.
    pub fn into_fringed(self) -> Result<FringedQuiver> {
        match self {
            QuiverFile::Base(g) => g.fringe(),
            QuiverFile::Fringed(f) => Ok(*f),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_quiver(text: &str) -> Result<QuiverFile> {
    let mut fringed = false;
    let mut vertices: Vec<(String, bool)> = Vec::new();
    let mut arrows = Vec::new();
    let mut relations = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let kw = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        match kw {
            "fringed" if rest.is_empty() => fringed = true,
            "vertex" | "fringe-vertex" => {
                if rest.len() != 1 {
                    return Err(perr(ln, format!("expected `{kw} <id>`")));
                }
                vertices.push((rest[0].to_string(), kw == "fringe-vertex"));
                if kw == "fringe-vertex" {
                    fringed = true;
                }
            }
            "arrow" => {
                // arrow <id>: <t> -> <h>
                let body = rest.join(" ");
                let (id, ends) = body.split_once(':').ok_or_else(|| perr(ln, "expected `arrow <id>: <tail> -> <head>`"))?;
                let (t, h) = ends.split_once("->").ok_or_else(|| perr(ln, "expected `->`"))?;
                let (id, t, h) = (id.trim(), t.trim(), h.trim());
                if id.is_empty() || t.is_empty() || h.is_empty() || t.contains(' ') || h.contains(' ') || id.contains(' ') {
                    return Err(perr(ln, "malformed arrow"));
                }
                arrows.push(Arrow::new(id, t, h));
            }
            "relation" => {
                if rest.len() != 2 {
                    return Err(perr(ln, "expected `relation <a> <b>`"));
                }
                relations.push((rest[0].to_string(), rest[1].to_string()));
            }
            _ => return Err(perr(ln, format!("unknown directive `{kw}`"))),
        }
    }
    if fringed {
        Ok(QuiverFile::Fringed(Box::new(FringedQuiver::new(vertices, arrows, relations)?)))
    } else {
        Ok(QuiverFile::Base(GentleQuiver {
            vertices: vertices.into_iter().map(|v| v.0).collect(),
            arrows,
            relations,
        }))
    }
}

/// Ids may contain `#`, so a comment only starts at a `#` opening a token.
pub(crate) fn strip_comment(raw: &str) -> &str {
    let b = raw.as_bytes();
    let mut end = raw.len();
    for i in 0..b.len() {
        if b[i] == b'#' && (i == 0 || b[i - 1].is_ascii_whitespace()) {
            end = i;
            break;
        }
    }
    raw[..end].trim()
}

pub fn load_fringed(text: &str) -> Result<FringedQuiver> {
    parse_quiver(text)?.into_fringed()
}
