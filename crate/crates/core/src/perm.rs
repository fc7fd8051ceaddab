//! The permanent side: weighted digraphs and their cycle covers, rosettes,
//! the iff-coupling gadget, and exponential sums of formulas as projections
//! of the permanent.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::abp::{weakly_skew_to_abp, Weight};
use crate::circuit::text::{content_lines, field_line, parse_field_line};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::eval::expand;
use crate::field::{Field, FieldElement};
use crate::matrix::{permanent, sparse_per_symbolic, Affine, SymMatrix};
use crate::poly::{var_list, SparsePolynomial};
use crate::projection::{Identity, ProjectionMatrix};

pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DEdge {
    pub from: usize,
    pub to: usize,
    pub weight: Weight,
}

impl DEdge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

/// Edge-weighted digraph. Edge ids are stable under removal. Parallel
/// edges are rejected, except that a node may carry several loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDigraph {
    field: Field,
    nodes: Vec<String>,
    edges: BTreeMap<EdgeId, DEdge>,
    next_edge: EdgeId,
}

/// Largest digraph whose cycle covers are enumerated explicitly.
pub const MAX_ENUMERATION_NODES: usize = 16;

impl WeightedDigraph {
    pub fn new(field: Field) -> WeightedDigraph {
        WeightedDigraph { field, nodes: Vec::new(), edges: BTreeMap::new(), next_edge: 0 }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_node(&mut self, name: &str) -> usize {
        self.nodes.push(name.to_string());
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, weight: Weight) -> Result<EdgeId> {
        if from >= self.nodes.len() || to >= self.nodes.len() {
            return Err(Error::Invalid("edge endpoint missing".into()));
        }
        if let Weight::Const(c) = &weight {
            if c.field() != self.field {
                return Err(Error::FieldMismatch);
            }
        }
        if from != to && self.edges.values().any(|e| e.from == from && e.to == to) {
            return Err(Error::DuplicateEdge(self.nodes[from].clone(), self.nodes[to].clone()));
        }
        let id = self.next_edge;
        self.next_edge += 1;
        self.edges.insert(id, DEdge { from, to, weight });
        Ok(id)
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<DEdge> {
        self.edges.remove(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&DEdge> {
        self.edges.get(&id)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &DEdge)> {
        self.edges.iter().map(|(&i, e)| (i, e))
    }

    pub fn set_weight(&mut self, id: EdgeId, weight: Weight) -> Result<()> {
        let e = self.edges.get_mut(&id).ok_or_else(|| Error::Invalid(format!("no edge {id}")))?;
        e.weight = weight;
        Ok(())
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = Vec::new();
        for e in self.edges.values() {
            if let Weight::Var(v) = &e.weight {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        vars
    }

    /// Weighted adjacency matrix; loops at one node are summed.
    pub fn to_matrix(&self) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.field, self.nodes.len());
        for e in self.edges.values() {
            let w = match &e.weight {
                Weight::Const(c) => Affine::constant(c.clone()),
                Weight::Var(v) => Affine::var(self.field, v),
            };
            let cur = m.get(e.from, e.to).add(&w);
            m.set(e.from, e.to, cur);
        }
        m
    }

    pub fn permanent(&self) -> Result<SparsePolynomial> {
        sparse_per_symbolic(&self.to_matrix())
    }

    /// Every cycle cover, as the list of chosen edges (one leaving each node).
    pub fn cycle_covers(&self) -> Result<Vec<Vec<EdgeId>>> {
        let n = self.nodes.len();
        if n > MAX_ENUMERATION_NODES {
            return Err(Error::BudgetExceeded { estimated: 1 << n, limit: 1 << MAX_ENUMERATION_NODES });
        }
        let mut out_edges: Vec<Vec<(EdgeId, usize)>> = vec![Vec::new(); n];
        for (&id, e) in &self.edges {
            out_edges[e.from].push((id, e.to));
        }
        let mut covers = Vec::new();
        let mut chosen = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn walk(
            v: usize,
            out_edges: &[Vec<(EdgeId, usize)>],
            used: &mut [bool],
            chosen: &mut Vec<EdgeId>,
            covers: &mut Vec<Vec<EdgeId>>,
        ) {
            if v == out_edges.len() {
                covers.push(chosen.clone());
                return;
            }
            for &(id, to) in &out_edges[v] {
                if !used[to] {
                    used[to] = true;
                    chosen.push(id);
                    walk(v + 1, out_edges, used, chosen, covers);
                    chosen.pop();
                    used[to] = false;
                }
            }
        }
        walk(0, &out_edges, &mut used, &mut chosen, &mut covers);
        Ok(covers)
    }

    fn poly_vars(&self) -> Arc<[String]> {
        var_list(&self.variables())
    }

    pub fn cover_weight(&self, cover: &[EdgeId]) -> SparsePolynomial {
        let vars = self.poly_vars();
        let mut acc = SparsePolynomial::constant(self.field, vars.clone(), self.field.one());
        for id in cover {
            acc = acc.mul(&self.edges[id].weight.to_poly(self.field, &vars));
        }
        acc
    }

    /// Sum of cover weights over covers that contain both or neither edge of
    /// every listed pair.
    pub fn respecting_cover_sum(&self, pairs: &[(EdgeId, EdgeId)]) -> Result<SparsePolynomial> {
        let mut acc = SparsePolynomial::zero(self.field, self.poly_vars());
        for cover in self.cycle_covers()? {
            if pairs.iter().all(|(a, b)| cover.contains(a) == cover.contains(b)) {
                acc = acc.add(&self.cover_weight(&cover));
            }
        }
        Ok(acc)
    }

    /// Copies `other` in as a disjoint component; returns its edge id map.
    pub fn absorb(&mut self, other: &WeightedDigraph) -> Result<HashMap<EdgeId, EdgeId>> {
        let offset = self.nodes.len();
        self.nodes.extend(other.nodes.iter().cloned());
        let mut map = HashMap::new();
        for (&id, e) in &other.edges {
            let new = self.add_edge(e.from + offset, e.to + offset, e.weight.clone())?;
            map.insert(id, new);
        }
        Ok(map)
    }

    /// Replaces `c = (u,v)` and `c2 = (u2,v2)` by the coupling gadget in
    /// place and returns the three new nodes.
    pub fn couple(&mut self, c: EdgeId, c2: EdgeId) -> Result<[usize; 3]> {
        let k = k_matrix(self.field)?;
        let e = self.edge(c).cloned().ok_or_else(|| Error::Invalid(format!("no edge {c}")))?;
        let e2 = self.edge(c2).cloned().ok_or_else(|| Error::Invalid(format!("no edge {c2}")))?;
        if c == c2 || [e.from, e.to].iter().any(|x| *x == e2.from || *x == e2.to) {
            return Err(Error::SharedEndpoints);
        }
        self.remove_edge(c);
        self.remove_edge(c2);
        let base = self.nodes.len();
        let p = [1, 2, 3].map(|i| self.add_node(&format!("p{base}_{i}")));
        let one = Weight::Const(self.field.one());
        self.add_edge(e.from, p[0], e.weight)?;
        self.add_edge(p[1], e.to, one.clone())?;
        self.add_edge(e2.from, p[2], e2.weight)?;
        self.add_edge(p[2], e2.to, one)?;
        for (i, row) in k.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    self.add_edge(p[i], p[j], Weight::Const(w.clone()))?;
                }
            }
        }
        Ok(p)
    }
}

/// Copy of `g` with edges `c` and `c2` iff-coupled.
pub fn iff_couple(g: &WeightedDigraph, c: EdgeId, c2: EdgeId) -> Result<WeightedDigraph> {
    let mut out = g.clone();
    out.couple(c, c2)?;
    Ok(out)
}

/// The coupling gadget's weight matrix.
pub fn k_matrix(field: Field) -> Result<Vec<Vec<FieldElement>>> {
    let h = field.half()?;
    let (one, m1) = (field.one(), field.neg_one());
    Ok(vec![
        vec![m1.clone(), one.clone(), h.clone()],
        vec![one.clone(), one.clone(), -&h],
        vec![one.clone(), one, -&h],
    ])
}

/// Permanent of `m` with the given (1-based) rows and columns removed.
pub fn per_minor(field: Field, m: &[Vec<FieldElement>], rows: &[usize], cols: &[usize]) -> Result<FieldElement> {
    let sub: Vec<Vec<FieldElement>> = m
        .iter()
        .enumerate()
        .filter(|(i, _)| !rows.contains(&(i + 1)))
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| !cols.contains(&(j + 1))).map(|(_, x)| x.clone()).collect())
        .collect();
    if sub.is_empty() {
        return Ok(field.one());
    }
    permanent(field, &sub)
}

/// The six permanent identities the gadget relies on, as
/// `(rows removed, columns removed, value, expected)`.
pub fn k_identities(field: Field) -> Result<Vec<(Vec<usize>, Vec<usize>, FieldElement, FieldElement)>> {
    let k = k_matrix(field)?;
    let cases: [(&[usize], &[usize], i64); 6] =
        [(&[], &[], 1), (&[2, 3], &[1, 3], 1), (&[2], &[1], 0), (&[2], &[3], 0), (&[3], &[1], 0), (&[3], &[3], 0)];
    cases
        .iter()
        .map(|&(r, c, want)| Ok((r.to_vec(), c.to_vec(), per_minor(field, &k, r, c)?, field.int(want))))
        .collect()
}

/// A rosette with its connector edges in cyclic order.
#[derive(Clone, Debug)]
pub struct Rosette {
    pub graph: WeightedDigraph,
    pub connectors: Vec<EdgeId>,
}

/// Rosette `R(mu)`: a directed `mu`-cycle of connectors `u_i -> u_(i+1)`,
/// detours `u_i -> v_i -> u_(i+1)`, and a loop at every node; all weights 1.
pub fn build_rosette(field: Field, mu: usize) -> Result<Rosette> {
    if mu == 0 {
        return Err(Error::ParamOutOfRange("rosette needs mu >= 1".into()));
    }
    let mut g = WeightedDigraph::new(field);
    let u: Vec<usize> = (1..=mu).map(|i| g.add_node(&format!("u{i}"))).collect();
    let v: Vec<usize> = (1..=mu).map(|i| g.add_node(&format!("v{i}"))).collect();
    let one = || Weight::Const(field.one());
    let mut connectors = Vec::with_capacity(mu);
    for i in 0..mu {
        connectors.push(g.add_edge(u[i], u[(i + 1) % mu], one())?);
    }
    for i in 0..mu {
        g.add_edge(u[i], v[i], one())?;
        g.add_edge(v[i], u[(i + 1) % mu], one())?;
    }
    for &x in u.iter().chain(&v) {
        g.add_edge(x, x, one())?;
    }
    Ok(Rosette { graph: g, connectors })
}

/// Digraph whose permanent is the formula's polynomial: the formula's ABP
/// with sink glued onto source and unit loops on the other nodes. Parallel
/// edges are split by a looped midpoint so every weight stays a single
/// variable or constant.
pub fn formula_to_per_digraph(c: &Circuit) -> Result<WeightedDigraph> {
    let c = c.with_outputs(vec![c.output()])?.pruned();
    if !c.is_formula() {
        return Err(Error::NotAFormula);
    }
    let a = weakly_skew_to_abp(&c)?;
    let field = a.field();
    let order = a.topological_order().expect("acyclic");
    let mut g = WeightedDigraph::new(field);
    let mut index = vec![usize::MAX; a.node_count()];
    let root = g.add_node("st");
    index[a.source()] = root;
    index[a.sink()] = root;
    for v in order {
        if v != a.source() && v != a.sink() {
            index[v] = g.add_node(&a.nodes()[v]);
        }
    }
    let one = || Weight::Const(field.one());
    for v in 1..g.node_count() {
        g.add_edge(v, v, one())?;
    }
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for e in a.edges() {
        if e.to == a.source() || e.from == a.sink() {
            continue;
        }
        let (i, j) = (index[e.from], index[e.to]);
        let k = seen.entry((i, j)).or_insert(0);
        *k += 1;
        if *k == 1 {
            g.add_edge(i, j, e.weight.clone())?;
        } else {
            let m = g.add_node(&format!("d{}", g.node_count()));
            g.add_edge(m, m, one())?;
            g.add_edge(i, m, e.weight.clone())?;
            g.add_edge(m, j, one())?;
        }
    }
    Ok(g)
}

/// Size accounting of one run of [`valiant_sum_to_per`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerSumReport {
    pub formula_nodes: usize,
    pub multiplicities: Vec<(String, usize)>,
    pub side: usize,
    pub bound: usize,
}

/// Matrix whose permanent is `sum over e in {0,1}^m of g(x, e)`, where the
/// summed variables are `summed` and `g` is a formula of size `< s`.
pub fn valiant_sum_to_per(g: &Circuit, summed: &[&str], s: usize) -> Result<(ProjectionMatrix, PerSumReport)> {
    let field = g.field();
    field.half()?;
    if g.size() >= s {
        return Err(Error::ParamOutOfRange(format!("formula size {} is not below s = {s}", g.size())));
    }
    for y in summed {
        if g.var_index(y).is_none() {
            return Err(Error::UnknownVariable(y.to_string()));
        }
    }
    let base = formula_to_per_digraph(g)?;
    let formula_nodes = base.node_count();
    let mut f = base.clone();
    let mut pairs = Vec::new();
    let mut multiplicities = Vec::new();
    let mut trace = vec![format!("formula size {}, digraph with {formula_nodes} nodes", g.size())];
    for y in summed {
        let d: Vec<EdgeId> =
            base.edges().filter(|(_, e)| matches!(&e.weight, Weight::Var(v) if v == y)).map(|(i, _)| i).collect();
        if d.is_empty() {
            return Err(Error::UnusedYVariable(y.to_string()));
        }
        for &id in &d {
            f.set_weight(id, Weight::Const(field.one()))?;
        }
        let r = build_rosette(field, d.len())?;
        let map = f.absorb(&r.graph)?;
        pairs.extend(d.iter().zip(&r.connectors).map(|(&di, ci)| (di, map[ci])));
        trace.push(format!("{y}: {} edges, rosette R({})", d.len(), d.len()));
        multiplicities.push((y.to_string(), d.len()));
    }
    for &(d, c) in &pairs {
        f.couple(d, c)?;
    }
    let total: usize = multiplicities.iter().map(|(_, m)| m).sum();
    debug_assert_eq!(f.node_count(), formula_nodes + 5 * total);
    let bound = 6 * s;
    if f.node_count() > bound {
        return Err(Error::SizeBoundViolated { actual: f.node_count(), bound });
    }
    trace.push(format!("{} couplings, side {} <= 6s = {bound}", pairs.len(), f.node_count()));
    let target = expand(g)?.sum_over_cube(summed);
    let report = PerSumReport { formula_nodes, multiplicities, side: f.node_count(), bound };
    Ok((ProjectionMatrix { matrix: f.to_matrix(), identity: Identity::Per, target, trace }, report))
}

pub fn serialize_digraph(g: &WeightedDigraph) -> String {
    let mut out = String::from("digraph\n");
    writeln!(out, "{}", field_line(g.field)).unwrap();
    for n in &g.nodes {
        writeln!(out, "node {n}").unwrap();
    }
    for e in g.edges.values() {
        if e.is_loop() {
            writeln!(out, "loop {} {}", g.nodes[e.from], e.weight).unwrap();
        } else {
            writeln!(out, "edge {} {} {}", g.nodes[e.from], g.nodes[e.to], e.weight).unwrap();
        }
    }
    out
}

pub fn parse_digraph(text: &str) -> Result<WeightedDigraph> {
    let mut g: Option<WeightedDigraph> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut header = false;
    for (line, toks) in content_lines(text) {
        let syntax = |m: &str| Error::Syntax { line, message: m.to_string() };
        let lookup = |name: &str| -> Result<usize> {
            index.get(name).copied().ok_or_else(|| Error::UnknownGateRef { line, gate: name.to_string() })
        };
        match toks.as_slice() {
            ["digraph"] if !header => header = true,
            _ if !header => return Err(Error::UnknownArtifactKind(toks[0].to_string())),
            ["field", rest @ ..] => g = Some(WeightedDigraph::new(parse_field_line(rest, line)?)),
            ["node", id] => {
                let g = g.as_mut().ok_or_else(|| syntax("node before field line"))?;
                if index.insert(id.to_string(), g.node_count()).is_some() {
                    return Err(Error::DuplicateGateId { line, gate: id.to_string() });
                }
                g.add_node(id);
            }
            ["edge", from, to, w] => {
                let (from, to) = (lookup(from)?, lookup(to)?);
                let g = g.as_mut().ok_or_else(|| syntax("edge before field line"))?;
                let w = Weight::parse(w, g.field)?;
                g.add_edge(from, to, w)?;
            }
            ["loop", at, w] => {
                let at = lookup(at)?;
                let g = g.as_mut().ok_or_else(|| syntax("loop before field line"))?;
                let w = Weight::parse(w, g.field)?;
                g.add_edge(at, at, w)?;
            }
            _ => return Err(syntax("unrecognized line")),
        }
    }
    g.ok_or_else(|| Error::Syntax { line: 0, message: "missing field line".into() })
}
