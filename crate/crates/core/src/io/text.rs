//! Line-oriented model format.
//!
//! ```text
//! model <name>
//! component <physical|logical|service|functional> <id> [protocols=a,b] [standards=x,y] [location=site] [desc="..."]
//! link <layer> <idA> <idB> [protocols=a,b]
//! map <upperId> <lowerId>
//! requirement <id> <srcId> <dstId> [layer=functional] [min_replicas=K] [min_locations=K]
//! ```
//!
//! `#` starts a comment outside quoted values.

use std::collections::BTreeSet;
use std::fmt;
use std::num::NonZeroUsize;

use crate::layer::LayerId;
use crate::model::{
    build_model, Component, LayeredModel, Link, LinkKey, ModelError, Projection, RefKind,
    Requirement,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{}{source}", line.map(|l| format!("{l}: ")).unwrap_or_default())]
    Model {
        line: Option<usize>,
        source: ModelError,
    },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } => Some(*line),
            ParseError::Model { line, .. } => *line,
        }
    }
}

/// A non-fatal remark about the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: warning: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct ParsedModel {
    pub model: LayeredModel,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug)]
struct Token {
    col: usize,
    text: String,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens; a double-quoted run
/// (with `\"` and `\\` escapes) may appear anywhere inside a token.
fn tokenize(line_no: usize, line: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = line.char_indices().peekable();
    let col_of = |byte: usize| line[..byte].chars().count() + 1;
    loop {
        while chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            chars.next();
        }
        let Some(&(start, c)) = chars.peek() else {
            break;
        };
        if c == '#' {
            break;
        }
        let mut text = String::new();
        while let Some(&(pos, c)) = chars.peek() {
            if c.is_whitespace() || c == '#' {
                break;
            }
            chars.next();
            if c != '"' {
                text.push(c);
                continue;
            }
            let mut closed = false;
            while let Some((_, c)) = chars.next() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match chars.next() {
                        Some((_, e @ ('"' | '\\'))) => text.push(e),
                        Some((p, _)) => return Err(syntax(line_no, col_of(p), "bad escape")),
                        None => break,
                    },
                    c => text.push(c),
                }
            }
            if !closed {
                return Err(syntax(line_no, col_of(pos), "unterminated quoted value"));
            }
        }
        tokens.push(Token {
            col: col_of(start),
            text,
        });
    }
    Ok(tokens)
}

fn check_id(line: usize, tok: &Token) -> Result<String, ParseError> {
    if tok.text.is_empty() || tok.text.contains(['=', '"', '#']) {
        return Err(syntax(
            line,
            tok.col,
            format!("invalid id \"{}\"", tok.text),
        ));
    }
    Ok(tok.text.clone())
}

fn parse_layer(line: usize, tok: &Token) -> Result<LayerId, ParseError> {
    tok.text
        .parse()
        .map_err(|e: crate::layer::UnknownLayer| syntax(line, tok.col, e.to_string()))
}

fn tag_set(value: &str) -> BTreeSet<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

struct Attr<'t> {
    key: &'t str,
    value: &'t str,
    col: usize,
}

fn attrs<'t>(line: usize, tokens: &'t [Token]) -> Result<Vec<Attr<'t>>, ParseError> {
    let mut out: Vec<Attr<'t>> = Vec::new();
    for tok in tokens {
        let Some((key, value)) = tok.text.split_once('=') else {
            return Err(syntax(
                line,
                tok.col,
                format!("expected key=value, found \"{}\"", tok.text),
            ));
        };
        if out.iter().any(|a| a.key == key) {
            return Err(syntax(
                line,
                tok.col,
                format!("duplicate attribute \"{key}\""),
            ));
        }
        out.push(Attr {
            key,
            value,
            col: tok.col,
        });
    }
    Ok(out)
}

fn positive(line: usize, attr: &Attr<'_>) -> Result<NonZeroUsize, ParseError> {
    attr.value.parse::<NonZeroUsize>().map_err(|_| {
        syntax(
            line,
            attr.col,
            format!("{} must be a positive integer", attr.key),
        )
    })
}

fn expect_args(line: usize, tokens: &[Token], count: usize, usage: &str) -> Result<(), ParseError> {
    if tokens.len() < count + 1 {
        let col = tokens.last().map_or(1, |t| t.col + t.text.chars().count());
        return Err(syntax(line, col, format!("expected: {usage}")));
    }
    Ok(())
}

#[derive(Debug)]
enum Directive {
    Component(Component),
    Link(LinkKey),
    Map(Projection),
    Requirement(Requirement),
}

pub fn parse_model(text: &str) -> Result<LayeredModel, ParseError> {
    parse_document(text).map(|p| p.model)
}

/// Parses a model, returning warnings for unknown attribute keys.
pub fn parse_document(text: &str) -> Result<ParsedModel, ParseError> {
    let mut name: Option<String> = None;
    let mut warnings = Vec::new();
    let mut directives: Vec<(usize, Directive)> = Vec::new();
    let mut components = Vec::new();
    let mut links = Vec::new();
    let mut projections = Vec::new();
    let mut requirements = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(line, raw)?;
        let Some(head) = tokens.first() else {
            continue;
        };
        let mut unknown = |a: &Attr<'_>| {
            warnings.push(Diagnostic {
                line,
                col: a.col,
                message: format!("unknown attribute \"{}\" ignored", a.key),
            })
        };
        match head.text.as_str() {
            "model" => {
                if name.is_some() {
                    return Err(syntax(line, head.col, "duplicate model header"));
                }
                let rest = raw.trim_start()["model".len()..].trim();
                let rest = rest.split('#').next().unwrap_or("").trim();
                if rest.is_empty() {
                    return Err(syntax(line, head.col, "expected: model <name>"));
                }
                name = Some(rest.to_string());
            }
            "component" => {
                expect_args(line, &tokens, 2, "component <layer> <id> [key=value ...]")?;
                let layer = parse_layer(line, &tokens[1])?;
                let mut c = Component::new(check_id(line, &tokens[2])?, layer);
                for a in attrs(line, &tokens[3..])? {
                    match a.key {
                        "protocols" => c.protocols = tag_set(a.value),
                        "standards" => c.standards = tag_set(a.value),
                        "location" => c.location = Some(a.value.to_string()),
                        "desc" => c.description = Some(a.value.to_string()),
                        _ => unknown(&a),
                    }
                }
                directives.push((line, Directive::Component(c.clone())));
                components.push(c);
            }
            "link" => {
                expect_args(line, &tokens, 3, "link <layer> <idA> <idB> [protocols=...]")?;
                let layer = parse_layer(line, &tokens[1])?;
                let a = check_id(line, &tokens[2])?;
                let b = check_id(line, &tokens[3])?;
                let mut link = Link::new(layer, a, b);
                for a in attrs(line, &tokens[4..])? {
                    match a.key {
                        "protocols" => link.protocols = tag_set(a.value),
                        _ => unknown(&a),
                    }
                }
                directives.push((line, Directive::Link(link.key.clone())));
                links.push(link);
            }
            "map" => {
                expect_args(line, &tokens, 2, "map <upperId> <lowerId>")?;
                if let Some(extra) = tokens.get(3) {
                    return Err(syntax(line, extra.col, "unexpected token after map"));
                }
                let p = Projection::new(check_id(line, &tokens[1])?, check_id(line, &tokens[2])?);
                directives.push((line, Directive::Map(p.clone())));
                projections.push(p);
            }
            "requirement" => {
                expect_args(
                    line,
                    &tokens,
                    3,
                    "requirement <id> <srcId> <dstId> [key=value ...]",
                )?;
                let mut r = Requirement::new(
                    check_id(line, &tokens[1])?,
                    check_id(line, &tokens[2])?,
                    check_id(line, &tokens[3])?,
                );
                for a in attrs(line, &tokens[4..])? {
                    match a.key {
                        "layer" => {
                            r.layer = a.value.parse().map_err(|e: crate::layer::UnknownLayer| {
                                syntax(line, a.col, e.to_string())
                            })?
                        }
                        "min_replicas" => r.min_replicas = Some(positive(line, &a)?),
                        "min_locations" => r.min_locations = Some(positive(line, &a)?),
                        _ => unknown(&a),
                    }
                }
                directives.push((line, Directive::Requirement(r.clone())));
                requirements.push(r);
            }
            other => {
                return Err(syntax(
                    line,
                    head.col,
                    format!("unknown directive \"{other}\""),
                ))
            }
        }
    }

    let model = build_model(
        name.unwrap_or_else(|| "unnamed".to_string()),
        components,
        links,
        projections,
        requirements,
    )
    .map_err(|source| ParseError::Model {
        line: locate(&directives, &source),
        source,
    })?;
    Ok(ParsedModel { model, warnings })
}

/// Finds the line of the directive that triggered a build error.
fn locate(directives: &[(usize, Directive)], err: &ModelError) -> Option<usize> {
    let find = |pred: &dyn Fn(&Directive) -> bool, nth: usize| {
        directives
            .iter()
            .filter(|(_, d)| pred(d))
            .nth(nth)
            .map(|(l, _)| *l)
    };
    let mentions = |kind: RefKind, id: &str, d: &Directive| match (kind, d) {
        (RefKind::Link, Directive::Link(k)) => k.touches(id),
        (RefKind::Projection, Directive::Map(p)) => p.upper == id || p.lower == id,
        (RefKind::Requirement, Directive::Requirement(r)) => r.src == id || r.dst == id,
        _ => false,
    };
    match err {
        ModelError::DuplicateId(id) => {
            let comp = |d: &Directive| matches!(d, Directive::Component(c) if &c.id == id);
            let req = |d: &Directive| matches!(d, Directive::Requirement(r) if &r.id == id);
            find(&comp, 1).or_else(|| find(&req, 1))
        }
        ModelError::DanglingReference { kind, id } | ModelError::LayerMismatch { kind, id, .. } => {
            find(&|d| mentions(*kind, id, d), 0)
        }
        ModelError::SelfLink(id) => find(
            &|d| matches!(d, Directive::Link(k) if &k.a == id && &k.b == id),
            0,
        ),
        ModelError::DuplicateLink(key) => find(&|d| matches!(d, Directive::Link(k) if k == key), 1),
        ModelError::DuplicateProjection { upper, lower } => find(
            &|d| matches!(d, Directive::Map(p) if &p.upper == upper && &p.lower == lower),
            1,
        ),
        _ => None,
    }
}

fn quote(value: &str) -> String {
    let needs = value.is_empty()
        || value
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '"' | '\\' | '#'));
    if !needs {
        return value.to_string();
    }
    let mut out = String::from("\"");
    for c in value.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn join(set: &BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(",")
}

/// Canonical text: header, components (layer descending, then id), links,
/// maps, requirements.
pub fn serialize_model(model: &LayeredModel) -> String {
    let mut out = format!("model {}\n", model.name());

    for layer in LayerId::TOP_DOWN {
        for c in model.components_on(layer) {
            out.push_str(&format!("component {} {}", layer.name(), c.id));
            if !c.protocols.is_empty() {
                out.push_str(&format!(" protocols={}", quote(&join(&c.protocols))));
            }
            if !c.standards.is_empty() {
                out.push_str(&format!(" standards={}", quote(&join(&c.standards))));
            }
            if let Some(loc) = &c.location {
                out.push_str(&format!(" location={}", quote(loc)));
            }
            if let Some(desc) = &c.description {
                out.push_str(&format!(" desc={}", quote(desc)));
            }
            out.push('\n');
        }
    }

    for layer in LayerId::TOP_DOWN {
        for l in model.links_on(layer) {
            out.push_str(&format!("link {} {} {}", layer.name(), l.key.a, l.key.b));
            if !l.protocols.is_empty() {
                out.push_str(&format!(" protocols={}", quote(&join(&l.protocols))));
            }
            out.push('\n');
        }
    }

    let mut maps: Vec<_> = model.projections().collect();
    maps.sort_by_key(|p| (std::cmp::Reverse(model.layer_of(&p.upper)), *p));
    for p in maps {
        out.push_str(&format!("map {} {}\n", p.upper, p.lower));
    }

    for r in model.requirements() {
        out.push_str(&format!(
            "requirement {} {} {} layer={}",
            r.id,
            r.src,
            r.dst,
            r.layer.name()
        ));
        if let Some(k) = r.min_replicas {
            out.push_str(&format!(" min_replicas={k}"));
        }
        if let Some(k) = r.min_locations {
            out.push_str(&format!(" min_locations={k}"));
        }
        out.push('\n');
    }
    out
}
