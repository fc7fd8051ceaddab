//! Algebraic branching programs: acyclic digraphs whose value is the sum,
//! over all source-to-sink paths, of the product of the edge weights.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::circuit::text::{content_lines, field_line, parse_field_line};
use crate::circuit::{valid_ident, Circuit, CircuitBuilder, GateId, Op};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::poly::{var_list, SparsePolynomial};

/// An edge weight: a field constant or a bare variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    Const(FieldElement),
    Var(String),
}

impl Weight {
    pub fn parse(text: &str, field: Field) -> Result<Weight> {
        if valid_ident(text) {
            Ok(Weight::Var(text.to_string()))
        } else {
            Ok(Weight::Const(field.parse_literal(text)?))
        }
    }

    pub fn eval(&self, point: &HashMap<String, FieldElement>) -> Result<FieldElement> {
        match self {
            Weight::Const(c) => Ok(c.clone()),
            Weight::Var(v) => point.get(v).cloned().ok_or_else(|| Error::MissingAssignment(v.clone())),
        }
    }

    pub fn to_poly(&self, field: Field, vars: &Arc<[String]>) -> SparsePolynomial {
        match self {
            Weight::Const(c) => SparsePolynomial::constant(field, vars.clone(), c.clone()),
            Weight::Var(v) => {
                let idx = vars.iter().position(|w| w == v).expect("variable listed");
                SparsePolynomial::variable(field, vars.clone(), idx)
            }
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Const(c) => write!(f, "{c}"),
            Weight::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbpEdge {
    pub from: usize,
    pub to: usize,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp {
    field: Field,
    nodes: Vec<String>,
    edges: Vec<AbpEdge>,
    source: usize,
    sink: usize,
}

impl Abp {
    pub fn new(field: Field, nodes: Vec<String>, edges: Vec<AbpEdge>, source: usize, sink: usize) -> Result<Abp> {
        let n = nodes.len();
        if source >= n || sink >= n {
            return Err(Error::Invalid("source or sink missing".into()));
        }
        if source == sink {
            return Err(Error::Invalid("source and sink coincide".into()));
        }
        for e in &edges {
            if e.from >= n || e.to >= n {
                return Err(Error::Invalid("edge endpoint missing".into()));
            }
            if let Weight::Const(c) = &e.weight {
                if c.field() != field {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        let abp = Abp { field, nodes, edges, source, sink };
        if abp.topological_order().is_none() {
            return Err(Error::CycleDetected { line: 0, gate: "abp".into() });
        }
        Ok(abp)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[AbpEdge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.edges {
            if let Weight::Var(v) = &e.weight {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Kahn order, or `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            indeg[e.to] += 1;
            out[e.from].push(e.to);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &w in out[v].iter().rev() {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn dp<V: Clone>(&self, one: V, zero: V, weight: impl Fn(&Weight) -> V, add: impl Fn(&V, &V) -> V, mul: impl Fn(&V, &V) -> V) -> V {
        let order = self.topological_order().expect("acyclic");
        let mut incoming: Vec<Vec<&AbpEdge>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            incoming[e.to].push(e);
        }
        let mut val: Vec<Option<V>> = vec![None; self.nodes.len()];
        for v in order {
            let mut acc = if v == self.source { Some(one.clone()) } else { None };
            for e in &incoming[v] {
                if let Some(u) = &val[e.from] {
                    let t = mul(&weight(&e.weight), u);
                    acc = Some(match acc {
                        Some(a) => add(&a, &t),
                        None => t,
                    });
                }
            }
            val[v] = acc;
        }
        val[self.sink].take().unwrap_or(zero)
    }

    /// SW(G) as a polynomial, by dynamic programming in topological order.
    pub fn expand(&self) -> SparsePolynomial {
        let vars = var_list(&self.variables());
        let field = self.field;
        self.dp(
            SparsePolynomial::constant(field, vars.clone(), field.one()),
            SparsePolynomial::zero(field, vars.clone()),
            |w| w.to_poly(field, &vars),
            |a, b| a.add(b),
            |a, b| a.mul(b),
        )
    }

    pub fn eval(&self, point: &HashMap<String, FieldElement>) -> Result<FieldElement> {
        for v in self.variables() {
            if !point.contains_key(&v) {
                return Err(Error::MissingAssignment(v));
            }
        }
        let field = self.field;
        Ok(self.dp(
            field.one(),
            field.zero(),
            |w| w.eval(point).expect("assigned"),
            |a, b| a + b,
            |a, b| a * b,
        ))
    }

    /// SW(G) straight from the definition: every source-to-sink path.
    pub fn path_sum(&self) -> SparsePolynomial {
        let vars = var_list(&self.variables());
        let field = self.field;
        let mut out: Vec<Vec<&AbpEdge>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            out[e.from].push(e);
        }
        let mut total = SparsePolynomial::zero(field, vars.clone());
        let mut stack = vec![(self.source, SparsePolynomial::constant(field, vars.clone(), field.one()))];
        while let Some((v, acc)) = stack.pop() {
            if v == self.sink {
                total = total.add(&acc);
            }
            for e in &out[v] {
                stack.push((e.to, acc.mul(&e.weight.to_poly(field, &vars))));
            }
        }
        total
    }

    /// Glues the sink of `self` to the source of `other`; the value multiplies.
    pub fn series(&self, other: &Abp) -> Result<Abp> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let off = self.nodes.len();
        let map = |v: usize| if v == other.source { self.sink } else if v < other.source { off + v } else { off + v - 1 };
        let mut nodes = self.nodes.clone();
        for (i, name) in other.nodes.iter().enumerate() {
            if i != other.source {
                nodes.push(format!("b.{name}"));
            }
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| AbpEdge { from: map(e.from), to: map(e.to), weight: e.weight.clone() }));
        Abp::new(self.field, nodes, edges, self.source, map(other.sink))
    }

    /// Identifies the two sources and the two sinks; the value adds.
    pub fn parallel(&self, other: &Abp) -> Result<Abp> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut nodes = self.nodes.clone();
        let mut map = vec![usize::MAX; other.nodes.len()];
        for (i, name) in other.nodes.iter().enumerate() {
            map[i] = if i == other.source {
                self.source
            } else if i == other.sink {
                self.sink
            } else {
                nodes.push(format!("b.{name}"));
                nodes.len() - 1
            };
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| AbpEdge { from: map[e.from], to: map[e.to], weight: e.weight.clone() }));
        Abp::new(self.field, nodes, edges, self.source, self.sink)
    }
}

struct AbpBuilder<'a> {
    c: &'a Circuit,
    uses: Vec<u32>,
    witness: HashMap<GateId, GateId>,
    memo: HashMap<GateId, usize>,
    nodes: usize,
    edges: Vec<AbpEdge>,
}

impl AbpBuilder<'_> {
    fn fresh(&mut self) -> usize {
        self.nodes += 1;
        self.nodes - 1
    }

    fn end(&mut self, target: Option<usize>) -> usize {
        match target {
            Some(t) => t,
            None => self.fresh(),
        }
    }

    fn edge(&mut self, from: usize, to: usize, weight: Weight) {
        self.edges.push(AbpEdge { from, to, weight });
    }

    fn shared(&self, g: GateId) -> bool {
        self.uses[g] > 1 && !self.c.gate(g).op.is_input()
    }

    /// Adds a block whose paths from `origin` to the returned node sum to
    /// the polynomial of `g`. When `target` is given the block ends there.
    fn emit(&mut self, g: GateId, origin: usize, target: Option<usize>) -> usize {
        if self.shared(g) {
            let node = match self.memo.get(&g) {
                Some(&n) => n,
                None => {
                    let n = self.emit_body(g, origin, None);
                    self.memo.insert(g, n);
                    n
                }
            };
            return match target {
                None => node,
                Some(t) => {
                    let one = Weight::Const(self.c.field().one());
                    self.edge(node, t, one);
                    t
                }
            };
        }
        self.emit_body(g, origin, target)
    }

    fn emit_body(&mut self, g: GateId, origin: usize, target: Option<usize>) -> usize {
        match &self.c.gate(g).op {
            Op::Input(v) => {
                let t = self.end(target);
                let w = Weight::Var(self.c.vars()[*v].clone());
                self.edge(origin, t, w);
                t
            }
            Op::Const(k) => {
                let t = self.end(target);
                self.edge(origin, t, Weight::Const(k.clone()));
                t
            }
            &Op::Add(a, b) => {
                let t = match target {
                    Some(t) => self.emit(a, origin, Some(t)),
                    None if self.shared(a) => {
                        let t = self.fresh();
                        self.emit(a, origin, Some(t))
                    }
                    None => self.emit(a, origin, None),
                };
                self.emit(b, origin, Some(t))
            }
            &Op::Mul(a, b) => {
                let d = self.witness[&g];
                let o = if d == a { b } else { a };
                let mid = self.emit(o, origin, None);
                self.emit(d, mid, target)
            }
        }
    }
}

/// Converts a weakly-skew circuit (first output) into an ABP with the same
/// value. Formulas with `m` operation gates give at most `m + 2` nodes and
/// `m + 1` edges.
pub fn weakly_skew_to_abp(c: &Circuit) -> Result<Abp> {
    let c = c.with_outputs(vec![c.output()])?.pruned();
    let witness = c.weakly_skew_witness().map_err(Error::NotWeaklySkew)?;
    let mut b = AbpBuilder { uses: c.uses(), c: &c, witness, memo: HashMap::new(), nodes: 2, edges: Vec::new() };
    b.emit(c.output(), 0, Some(1));
    let nodes = b.nodes;
    let edges = b.edges;
    let names = (0..nodes)
        .map(|i| match i {
            0 => "s".to_string(),
            1 => "t".to_string(),
            _ => format!("n{i}"),
        })
        .collect();
    Abp::new(c.field(), names, edges, 0, 1)
}

/// Skew circuit computing SW(G): every node value is a sum of
/// `weight * predecessor` products whose first factor is an input gate.
pub fn abp_to_skew_circuit(a: &Abp) -> Circuit {
    let n = a.node_count();
    let mut fwd = vec![false; n];
    let mut bwd = vec![false; n];
    fwd[a.source] = true;
    bwd[a.sink] = true;
    let order = a.topological_order().expect("acyclic");
    for &v in &order {
        for e in a.edges.iter().filter(|e| e.from == v) {
            if fwd[v] {
                fwd[e.to] = true;
            }
        }
    }
    for &v in order.iter().rev() {
        for e in a.edges.iter().filter(|e| e.from == v) {
            if bwd[e.to] {
                bwd[v] = true;
            }
        }
    }
    let relevant = |v: usize| fwd[v] && bwd[v];
    let mut b = CircuitBuilder::new(a.field);
    for v in a.variables() {
        b.declare_var(&v);
    }
    let mut value: Vec<Option<GateId>> = vec![None; n];
    for &v in &order {
        if v == a.source || !relevant(v) {
            continue;
        }
        let mut acc: Option<GateId> = None;
        for e in a.edges.iter().filter(|e| e.to == v && relevant(e.from)) {
            let w = match &e.weight {
                Weight::Var(name) => b.input(name),
                Weight::Const(k) => b.constant(k.clone()),
            };
            let term = if e.from == a.source { w } else { b.mul(w, value[e.from].expect("earlier node")) };
            acc = Some(match acc {
                None => term,
                Some(s) => b.add(s, term),
            });
        }
        value[v] = acc;
    }
    let out = match value[a.sink] {
        Some(g) => g,
        None => b.int(0),
    };
    b.finish(vec![out]).expect("valid circuit")
}

pub fn parse_abp(text: &str) -> Result<Abp> {
    let mut field = None;
    let mut nodes: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let (mut source, mut sink) = (None, None);
    let mut header = false;
    for (line, toks) in content_lines(text) {
        let syntax = |m: &str| Error::Syntax { line, message: m.to_string() };
        let lookup = |name: &str| -> Result<usize> {
            index.get(name).copied().ok_or_else(|| Error::UnknownGateRef { line, gate: name.to_string() })
        };
        match toks.as_slice() {
            ["abp"] if !header => header = true,
            _ if !header => return Err(Error::UnknownArtifactKind(toks[0].to_string())),
            ["field", rest @ ..] => field = Some(parse_field_line(rest, line)?),
            ["node", id] => {
                if index.insert(id.to_string(), nodes.len()).is_some() {
                    return Err(Error::DuplicateGateId { line, gate: id.to_string() });
                }
                nodes.push(id.to_string());
            }
            ["edge", from, to, w] => {
                let f = field.ok_or_else(|| syntax("edge before field line"))?;
                edges.push(AbpEdge { from: lookup(from)?, to: lookup(to)?, weight: Weight::parse(w, f)? });
            }
            ["source", id] => source = Some(lookup(id)?),
            ["sink", id] => sink = Some(lookup(id)?),
            _ => return Err(syntax("unrecognized line")),
        }
    }
    let field = field.ok_or_else(|| Error::Syntax { line: 0, message: "missing field line".into() })?;
    let source = source.ok_or_else(|| Error::Syntax { line: 0, message: "missing source".into() })?;
    let sink = sink.ok_or_else(|| Error::Syntax { line: 0, message: "missing sink".into() })?;
    Abp::new(field, nodes, edges, source, sink)
}

pub fn serialize_abp(a: &Abp) -> String {
    let mut out = String::from("abp\n");
    writeln!(out, "{}", field_line(a.field)).unwrap();
    for n in &a.nodes {
        writeln!(out, "node {n}").unwrap();
    }
    for e in &a.edges {
        writeln!(out, "edge {} {} {}", a.nodes[e.from], a.nodes[e.to], e.weight).unwrap();
    }
    writeln!(out, "source {}", a.nodes[a.source]).unwrap();
    writeln!(out, "sink {}", a.nodes[a.sink]).unwrap();
    out
}
