//! A small checker for the DOT subset the emitter produces: one digraph of
//! attribute, node and edge statements. Record labels must have balanced
//! braces and well-formed ports.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Str(String),
    Arrow,
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        s.push('\\');
                        s.push(*cs.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Str(s));
        } else if c == '-' && cs.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow);
            i += 2;
        } else if c.is_alphanumeric() || c == '_' || c == '#' || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '#' || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Id(cs[start..i].iter().collect()));
        } else if "{}[]=;,:".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Result<Tok, String> {
        let t = self.toks.get(self.pos).cloned().ok_or("unexpected end")?;
        self.pos += 1;
        Ok(t)
    }
    fn sym(&mut self, c: char) -> Result<(), String> {
        match self.next()? {
            Tok::Sym(d) if d == c => Ok(()),
            t => Err(format!("expected {c:?}, got {t:?}")),
        }
    }
    fn id(&mut self) -> Result<String, String> {
        match self.next()? {
            Tok::Id(s) | Tok::Str(s) => Ok(s),
            t => Err(format!("expected identifier, got {t:?}")),
        }
    }
    fn node_ref(&mut self) -> Result<(String, Option<String>), String> {
        let n = self.id()?;
        if self.peek() == Some(&Tok::Sym(':')) {
            self.pos += 1;
            return Ok((n, Some(self.id()?)));
        }
        Ok((n, None))
    }
    fn attrs(&mut self) -> Result<Vec<(String, String)>, String> {
        let mut out = Vec::new();
        self.sym('[')?;
        loop {
            if self.peek() == Some(&Tok::Sym(']')) {
                self.pos += 1;
                return Ok(out);
            }
            let k = self.id()?;
            self.sym('=')?;
            let v = self.id()?;
            out.push((k, v));
            if self.peek() == Some(&Tok::Sym(',')) {
                self.pos += 1;
            }
        }
    }
}

/// Ports declared by a record label, or an error if it is malformed.
fn record_ports(label: &str) -> Result<Vec<String>, String> {
    let cs: Vec<char> = label.chars().collect();
    let mut depth = 0i32;
    let mut ports = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        match cs[i] {
            '\\' => i += 1,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced '}' in record".into());
                }
            }
            '<' => {
                let end = cs[i..].iter().position(|&c| c == '>').ok_or("unterminated port")?;
                ports.push(cs[i + 1..i + end].iter().collect());
                i += end;
            }
            '>' => return Err("stray '>' in record".into()),
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err("unbalanced '{' in record".into());
    }
    Ok(ports)
}

/// Summary of a parsed graph.
#[derive(Debug, Default)]
pub struct DotGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String, Vec<(String, String)>)>,
}

pub fn check_dot(src: &str) -> Result<DotGraph, String> {
    let mut p = P { toks: lex(src)?, pos: 0 };
    if p.id()? != "digraph" {
        return Err("expected digraph".into());
    }
    p.id()?;
    p.sym('{')?;
    let mut g = DotGraph::default();
    let mut ports: std::collections::HashMap<String, Vec<String>> = Default::default();
    loop {
        match p.peek() {
            Some(Tok::Sym('}')) => {
                p.pos += 1;
                break;
            }
            None => return Err("missing closing brace".into()),
            _ => {}
        }
        let (a, port_a) = p.node_ref()?;
        match p.peek() {
            Some(Tok::Sym('=')) => {
                p.pos += 1;
                p.id()?;
            }
            Some(Tok::Arrow) => {
                p.pos += 1;
                let (b, port_b) = p.node_ref()?;
                for (n, port) in [(&a, &port_a), (&b, &port_b)] {
                    let known = ports.get(n).ok_or(format!("edge uses undeclared node {n}"))?;
                    if let Some(port) = port {
                        if !known.contains(port) {
                            return Err(format!("node {n} has no port {port}"));
                        }
                    }
                }
                let attrs = if p.peek() == Some(&Tok::Sym('[')) { p.attrs()? } else { Vec::new() };
                g.edges.push((a, b, attrs));
            }
            _ => {
                let attrs = if p.peek() == Some(&Tok::Sym('[')) { p.attrs()? } else { Vec::new() };
                if !["node", "edge", "graph"].contains(&a.as_str()) {
                    let record = attrs.iter().any(|(k, v)| k == "shape" && v == "record");
                    let label = attrs.iter().find(|(k, _)| k == "label").map(|(_, v)| v.clone()).unwrap_or_default();
                    let ps = if record { record_ports(&label)? } else { Vec::new() };
                    ports.insert(a.clone(), ps);
                    g.nodes.push(a);
                }
            }
        }
        p.sym(';')?;
    }
    if p.pos != p.toks.len() {
        return Err("trailing input".into());
    }
    Ok(g)
}
