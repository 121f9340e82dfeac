//! Quantifier-free sign conditions on polynomials in `x1..xN` and one
//! parameter `l`: parsing, evaluation with tolerance, formats, and the
//! tuple formula that carves an expanded diagonal out of a Cartesian power.

mod parser;
mod poly;

pub use poly::{CompiledPoly, Polynomial};

use crate::error::{Error, Result};
use num_rational::BigRational;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt)
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }
}

/// Formula tree. Atoms index into the owning [`Formula`]'s polynomial table.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    And(Vec<Node>),
    Or(Vec<Node>),
    Not(Box<Node>),
    Atom { poly: usize, rel: Relation },
}

/// A quantifier-free formula with a deduplicated polynomial table.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    num_vars: usize,
    table: Vec<Polynomial>,
    root: Node,
}

/// Algebraic complexity format: x-variable count, max degree in x,
/// distinct polynomial count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct AlgFormat {
    pub n: u64,
    pub d: u64,
    pub s: u64,
}

/// Parse a formula from text. Polynomials are expanded, normalized, and
/// deduplicated across atoms.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let tree = parser::parse(text)?;
    let mut table = Vec::new();
    let mut seen: HashMap<Polynomial, usize> = HashMap::new();
    let root = intern(tree.root, &mut table, &mut seen);
    Ok(Formula { num_vars: tree.num_vars, table, root })
}

fn intern(
    raw: parser::RawNode,
    table: &mut Vec<Polynomial>,
    seen: &mut HashMap<Polynomial, usize>,
) -> Node {
    match raw {
        parser::RawNode::And(items) => {
            Node::And(items.into_iter().map(|n| intern(n, table, seen)).collect())
        }
        parser::RawNode::Or(items) => {
            Node::Or(items.into_iter().map(|n| intern(n, table, seen)).collect())
        }
        parser::RawNode::Not(inner) => Node::Not(Box::new(intern(*inner, table, seen))),
        parser::RawNode::Atom(poly, rel) => {
            let id = *seen.entry(poly.clone()).or_insert_with(|| {
                table.push(poly);
                table.len() - 1
            });
            Node::Atom { poly: id, rel }
        }
    }
}

impl Formula {
    /// The constant-true formula (empty conjunction).
    pub fn trivially_true() -> Formula {
        Formula { num_vars: 0, table: Vec::new(), root: Node::And(Vec::new()) }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn table(&self) -> &[Polynomial] {
        &self.table
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn atom_count(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::And(v) | Node::Or(v) => v.iter().map(walk).sum(),
                Node::Not(b) => walk(b),
                Node::Atom { .. } => 1,
            }
        }
        walk(&self.root)
    }

    /// No negations and no strict relations.
    pub fn is_p_closed(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::And(v) | Node::Or(v) => v.iter().all(walk),
                Node::Not(_) => false,
                Node::Atom { rel, .. } => !rel.is_strict(),
            }
        }
        walk(&self.root)
    }

    /// Evaluate at a point with an absolute tolerance on the atoms:
    /// `p = 0` holds when `|p| <= tol`, `p <= 0` when `p <= tol`,
    /// `p < 0` when `p < -tol`, and symmetrically for `>=` and `>`.
    pub fn evaluate(&self, x: &[f64], lambda: f64, tol: f64) -> Result<bool> {
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: x.len() });
        }
        let values: Vec<f64> = self.table.iter().map(|p| p.eval(x, lambda)).collect();
        Ok(eval_node(&self.root, &values, tol))
    }

    /// Float view for hot sampling loops; coefficients are converted once.
    pub fn compile(&self) -> CompiledFormula {
        CompiledFormula {
            num_vars: self.num_vars,
            table: self.table.iter().map(Polynomial::compile).collect(),
            root: self.root.clone(),
        }
    }
}

fn eval_node(node: &Node, values: &[f64], tol: f64) -> bool {
    match node {
        Node::And(items) => items.iter().all(|n| eval_node(n, values, tol)),
        Node::Or(items) => items.iter().any(|n| eval_node(n, values, tol)),
        Node::Not(inner) => !eval_node(inner, values, tol),
        Node::Atom { poly, rel } => {
            let v = values[*poly];
            match rel {
                Relation::Eq => v.abs() <= tol,
                Relation::Le => v <= tol,
                Relation::Ge => v >= -tol,
                Relation::Lt => v < -tol,
                Relation::Gt => v > tol,
            }
        }
    }
}

/// Formula with float-compiled polynomial table.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    num_vars: usize,
    table: Vec<CompiledPoly>,
    root: Node,
}

impl CompiledFormula {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn evaluate(&self, x: &[f64], lambda: f64, tol: f64) -> bool {
        let values: Vec<f64> = self.table.iter().map(|p| p.eval(x, lambda)).collect();
        eval_node(&self.root, &values, tol)
    }
}

/// Complexity format of a formula: distinct x-variables appearing, max
/// degree in x over the table, table size.
pub fn format_of(f: &Formula) -> AlgFormat {
    let mut used = vec![false; f.num_vars];
    for p in &f.table {
        for i in p.vars_used() {
            used[i] = true;
        }
    }
    AlgFormat {
        n: used.iter().filter(|&&u| u).count() as u64,
        d: f.table.iter().map(|p| p.degree_in_x() as u64).max().unwrap_or(0),
        s: f.table.len() as u64,
    }
}

/// Sum of squared pairwise distances between the `p+1` blocks of
/// `n`-variable points, as an exact polynomial in `n*(p+1)` variables.
pub fn tuple_scatter_poly(n: usize, p: usize) -> Polynomial {
    let total = n * (p + 1);
    let mut acc = Polynomial::zero(total);
    for i in 0..=p {
        for j in (i + 1)..=p {
            for k in 0..n {
                let xi = Polynomial::var(total, i * n + k);
                let xj = Polynomial::var(total, j * n + k);
                acc = acc.add(&xi.sub(&xj).pow(2));
            }
        }
    }
    acc
}

/// Build the formula cutting the expanded `p`-th diagonal out of the
/// `(p+1)`-fold Cartesian power: a conjunction of one copy of `f` per
/// block of variables plus the atom `scatter - delta <= 0`.
pub fn diagonal_formula(f: &Formula, p: usize, delta: &BigRational) -> Formula {
    let n = f.num_vars;
    let blocks = p + 1;
    let total = n * blocks;

    let mut table = Vec::new();
    let mut seen: HashMap<Polynomial, usize> = HashMap::new();
    let mut intern_poly = |poly: Polynomial, table: &mut Vec<Polynomial>| -> usize {
        *seen.entry(poly.clone()).or_insert_with(|| {
            table.push(poly);
            table.len() - 1
        })
    };

    let mut conjuncts = Vec::with_capacity(blocks + 1);
    for b in 0..blocks {
        let copy = map_block(&f.root, f, b, blocks, &mut intern_poly, &mut table);
        conjuncts.push(copy);
    }

    let scatter = tuple_scatter_poly(n, p)
        .sub(&Polynomial::constant(total, delta.clone()));
    let scatter_id = intern_poly(scatter, &mut table);
    conjuncts.push(Node::Atom { poly: scatter_id, rel: Relation::Le });

    Formula { num_vars: total, table, root: Node::And(conjuncts) }
}

fn map_block(
    node: &Node,
    f: &Formula,
    block: usize,
    blocks: usize,
    intern_poly: &mut impl FnMut(Polynomial, &mut Vec<Polynomial>) -> usize,
    table: &mut Vec<Polynomial>,
) -> Node {
    match node {
        Node::And(items) => Node::And(
            items.iter().map(|n| map_block(n, f, block, blocks, intern_poly, table)).collect(),
        ),
        Node::Or(items) => Node::Or(
            items.iter().map(|n| map_block(n, f, block, blocks, intern_poly, table)).collect(),
        ),
        Node::Not(inner) => {
            Node::Not(Box::new(map_block(inner, f, block, blocks, intern_poly, table)))
        }
        Node::Atom { poly, rel } => {
            let shifted = f.table[*poly].shift_block(block, blocks);
            Node::Atom { poly: intern_poly(shifted, table), rel: *rel }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, &self.table, Ctx::Top)
    }
}

#[derive(PartialEq, Clone, Copy)]
enum Ctx {
    Top,
    InOr,
    InAnd,
}

fn write_node(
    f: &mut fmt::Formatter<'_>,
    node: &Node,
    table: &[Polynomial],
    ctx: Ctx,
) -> fmt::Result {
    match node {
        // Like-in-like chains must keep parentheses or reparsing would
        // flatten them; an Or under an And needs them for precedence.
        Node::Or(items) => {
            let parens = ctx != Ctx::Top;
            if parens {
                write!(f, "(")?;
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, " || ")?;
                }
                write_node(f, item, table, Ctx::InOr)?;
            }
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        Node::And(items) => {
            let parens = ctx == Ctx::InAnd;
            if parens {
                write!(f, "(")?;
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, " && ")?;
                }
                write_node(f, item, table, Ctx::InAnd)?;
            }
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        Node::Not(inner) => {
            write!(f, "!(")?;
            write_node(f, inner, table, Ctx::Top)?;
            write!(f, ")")
        }
        Node::Atom { poly, rel } => write!(f, "{} {} 0", table[*poly], rel.symbol()),
    }
}
