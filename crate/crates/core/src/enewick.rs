//! Extended Newick text for multi-labelled networks.
//!
//! ```text
//! network  := subtree ';'
//! subtree  := leafset | '(' subtree ',' subtree ')' tag? | '(' subtree ')' tag | tag
//! tag      := '#H' digits
//! leafset  := taxon ('|' taxon)*
//! ```
//!
//! A tag appears twice: once carrying the reticulation's child and once bare.
//! `(A,B)#Hk` is read as a reticulation whose child is the tree vertex over
//! `A` and `B`. At top level, `(a);` and `a;` both denote the singleton.
//! Whitespace between tokens is ignored.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::model::{label_string, Graph, LabelSet, Network, Taxon, VertexId, RESERVED_CHARS};

enum Node {
    Vertex(VertexId),
    Ref(u64),
}

#[derive(Default)]
struct TagUse {
    defined: Vec<VertexId>,
    referenced_by: Vec<VertexId>,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    graph: Graph,
    tags: BTreeMap<u64, TagUse>,
    owner: HashMap<Taxon, ()>,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.error(format!("expected '{c}', found '{x}'")),
            None => self.error(format!("expected '{c}', found end of input")),
        }
    }

    fn taxon(&mut self) -> Result<Taxon> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() || RESERVED_CHARS.contains(&c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return match self.text[self.pos..].chars().next() {
                Some(c) => self.error(format!("expected a taxon, found '{c}'")),
                None => self.error("expected a taxon, found end of input"),
            };
        }
        let t = Taxon::new(&self.text[start..self.pos]).expect("scanned taxon is valid");
        if self.owner.insert(t.clone(), ()).is_some() {
            return Err(Error::DuplicateTaxon(t.to_string()));
        }
        Ok(t)
    }

    fn leafset(&mut self) -> Result<VertexId> {
        let mut set = LabelSet::new();
        set.insert(self.taxon()?);
        while self.peek() == Some('|') {
            self.pos += 1;
            set.insert(self.taxon()?);
        }
        Ok(self.graph.add_leaf(set))
    }

    fn tag(&mut self) -> Result<u64> {
        self.expect('#')?;
        if self.text[self.pos..].starts_with('H') {
            self.pos += 1;
        } else {
            return self.error("expected 'H' after '#'");
        }
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected tag digits");
        }
        self.text[start..self.pos]
            .parse()
            .or_else(|_| self.error("tag number out of range"))
    }

    fn attach(&mut self, parent: VertexId, child: Node) {
        match child {
            Node::Vertex(c) => self.graph.add_edge(parent, c),
            Node::Ref(t) => self.tags.entry(t).or_default().referenced_by.push(parent),
        }
    }

    fn subtree(&mut self, top: bool) -> Result<Node> {
        match self.peek() {
            Some('#') => Ok(Node::Ref(self.tag()?)),
            Some('(') => {
                self.pos += 1;
                let first = self.subtree(false)?;
                let second = if self.peek() == Some(',') {
                    self.pos += 1;
                    Some(self.subtree(false)?)
                } else {
                    None
                };
                self.expect(')')?;
                let tag = if self.peek() == Some('#') {
                    Some(self.tag()?)
                } else {
                    None
                };
                let single = second.is_none();
                let inner = match second {
                    Some(second) => {
                        let v = self.graph.add_vertex();
                        self.attach(v, first);
                        self.attach(v, second);
                        Node::Vertex(v)
                    }
                    None if tag.is_none() && !top => {
                        return self.error("a single-child group needs a reticulation tag");
                    }
                    None => first,
                };
                match tag {
                    Some(t) => {
                        let r = self.graph.add_vertex();
                        self.attach(r, inner);
                        self.tags.entry(t).or_default().defined.push(r);
                        Ok(Node::Vertex(r))
                    }
                    None if single => {
                        // Top-level `(x)`: the unary root of the singleton.
                        let root = self.graph.add_vertex();
                        self.attach(root, inner);
                        Ok(Node::Vertex(root))
                    }
                    None => Ok(inner),
                }
            }
            Some(_) => {
                let leaf = self.leafset()?;
                if top {
                    let root = self.graph.add_vertex();
                    self.graph.add_edge(root, leaf);
                    Ok(Node::Vertex(root))
                } else {
                    Ok(Node::Vertex(leaf))
                }
            }
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses one network.
pub fn parse(text: &str) -> Result<Network> {
    let mut p = Parser {
        text,
        pos: 0,
        graph: Graph::new(),
        tags: BTreeMap::new(),
        owner: HashMap::new(),
    };
    let top = p.subtree(true)?;
    p.expect(';')?;
    if let Some(c) = p.peek() {
        return p.error(format!("unexpected '{c}' after ';'"));
    }
    if let Node::Ref(_) = top {
        return Err(Error::Syntax {
            position: 0,
            message: "the network cannot be a bare reticulation reference".into(),
        });
    }
    let tags = std::mem::take(&mut p.tags);
    for (tag, used) in tags {
        if used.defined.len() != 1 || used.referenced_by.len() != 1 {
            return Err(Error::TagUsage {
                tag,
                uses: used.defined.len() + used.referenced_by.len(),
            });
        }
        p.graph.add_edge(used.referenced_by[0], used.defined[0]);
    }
    Network::new(p.graph)
}

/// Writes `n` with the given child order at every vertex. Tags are numbered
/// by first visit; the first visit carries the child.
pub fn render(n: &Network, order: &dyn Fn(VertexId) -> Vec<VertexId>) -> String {
    let mut out = String::new();
    let mut tags: HashMap<VertexId, usize> = HashMap::new();
    // Explicit stack so that deep networks do not overflow.
    enum Step {
        Visit(VertexId),
        Text(String),
    }
    let mut stack = vec![Step::Visit(n.root())];
    while let Some(step) = stack.pop() {
        let v = match step {
            Step::Text(s) => {
                out.push_str(&s);
                continue;
            }
            Step::Visit(v) => v,
        };
        if n.is_reticulation(v) {
            if let Some(k) = tags.get(&v) {
                out.push_str(&format!("#H{k}"));
                continue;
            }
            let k = tags.len() + 1;
            tags.insert(v, k);
            out.push('(');
            stack.push(Step::Text(format!(")#H{k}")));
            stack.push(Step::Visit(n.children(v)[0]));
            continue;
        }
        let kids = order(v);
        if kids.is_empty() {
            out.push_str(&label_string(n.labels(v)));
            continue;
        }
        out.push('(');
        stack.push(Step::Text(")".into()));
        for (i, &c) in kids.iter().enumerate().rev() {
            stack.push(Step::Visit(c));
            if i > 0 {
                stack.push(Step::Text(",".into()));
            }
        }
    }
    out.push(';');
    out
}

/// Canonical text: strongly isomorphic networks give identical strings.
/// Networks above level 1 are written in stored child order.
pub fn serialize(n: &Network) -> String {
    match crate::iso::canonical_child_order(n) {
        Some(order) => render(n, &|v| order.get(&v).cloned().unwrap_or_default()),
        None => render(n, &|v| n.children(v).to_vec()),
    }
}
