use serde::Serialize;

use super::complex::{MultiplicityMode, SimplicialComplex};
use super::table::ProbabilityTable;
use crate::error::{Error, Result};
use crate::scalar::{KahanSum, Real};

/// `-sum p ln p` in nats, with `0 ln 0 = 0`.
pub fn shannon<T: Real>(dist: &ProbabilityTable<T>) -> Result<T> {
    let mut total = KahanSum::new();
    let mut acc = KahanSum::new();
    for &p in dist.masses() {
        total.add(p);
        if p > T::zero() {
            acc.add(-p * p.ln());
        }
    }
    if (total.value() - T::one()).abs() > T::norm_tol() {
        return Err(Error::Unnormalized {
            sum: total.value().as_f64(),
        });
    }
    Ok(acc.value().max(T::zero()))
}

/// Free-function form of [`ProbabilityTable::marginalize`].
pub fn marginalize<T: Real>(joint: &ProbabilityTable<T>, keep: &[&str]) -> Result<ProbabilityTable<T>> {
    joint.marginalize(keep)
}

/// One signed entropy term of a decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyTerm<T> {
    /// Variables of the marginal, e.g. `x,h1`.
    pub term: String,
    pub coefficient: T,
    pub entropy: T,
    pub contribution: T,
}

/// Terms in evaluation order and their sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyBreakdown<T> {
    pub terms: Vec<EntropyTerm<T>>,
    pub total: T,
}

impl<T: Real> EntropyBreakdown<T> {
    fn from_terms(terms: Vec<EntropyTerm<T>>) -> Self {
        let mut acc = KahanSum::new();
        for t in &terms {
            acc.add(t.contribution);
        }
        Self {
            terms,
            total: acc.value(),
        }
    }
}

fn term<T: Real>(joint: &ProbabilityTable<T>, positions: &[usize], coefficient: T) -> Result<EntropyTerm<T>> {
    let marginal = joint.marginalize_positions(positions)?;
    let entropy = shannon(&marginal)?;
    let names: Vec<&str> = positions
        .iter()
        .map(|&p| joint.variables()[p].name.as_str())
        .collect();
    Ok(EntropyTerm {
        term: names.join(","),
        coefficient,
        entropy,
        contribution: coefficient * entropy,
    })
}

fn require_chain<T: Real>(joint: &ProbabilityTable<T>) -> Result<usize> {
    let n = joint.variables().len();
    if n < 2 {
        return Err(Error::InvalidTable(format!(
            "a chain needs at least two variables, found {n}"
        )));
    }
    Ok(n)
}

/// Chain formula over the table's variables in their declared order
/// `x, h1, ..., hP`: every single-variable entropy enters with `+1`,
/// every adjacent pair entropy with `-1`.
pub fn paper_chain_breakdown<T: Real>(joint: &ProbabilityTable<T>) -> Result<EntropyBreakdown<T>> {
    let n = require_chain(joint)?;
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        terms.push(term(joint, &[i], T::one())?);
    }
    for i in 0..n - 1 {
        terms.push(term(joint, &[i, i + 1], -T::one())?);
    }
    Ok(EntropyBreakdown::from_terms(terms))
}

pub fn paper_chain_entropy<T: Real>(joint: &ProbabilityTable<T>) -> Result<T> {
    Ok(paper_chain_breakdown(joint)?.total)
}

/// Rewriting of the chain formula in mutual informations:
/// `chain = sum_i I(v_i; v_{i+1}) - sum_{interior i} S[v_i]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainDecomposition<T> {
    pub mutual_informations: Vec<T>,
    pub interior_entropies: Vec<T>,
    pub chain_entropy: T,
}

impl<T: Real> ChainDecomposition<T> {
    /// `sum I - sum S_interior`, evaluated independently of the chain sum.
    pub fn recombined(&self) -> T {
        let mut acc = KahanSum::new();
        for &mi in &self.mutual_informations {
            acc.add(mi);
        }
        for &s in &self.interior_entropies {
            acc.add(-s);
        }
        acc.value()
    }
}

pub fn chain_decomposition<T: Real>(joint: &ProbabilityTable<T>) -> Result<ChainDecomposition<T>> {
    let n = require_chain(joint)?;
    let mutual_informations = (0..n - 1)
        .map(|i| mutual_information(joint, i, i + 1))
        .collect::<Result<Vec<_>>>()?;
    let interior_entropies = (1..n - 1)
        .map(|i| shannon(&joint.marginalize_positions(&[i])?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainDecomposition {
        mutual_informations,
        interior_entropies,
        chain_entropy: paper_chain_entropy(joint)?,
    })
}

/// `I(a; b) = sum p(a, b) ln [p(a, b) / (p(a) p(b))]`, computed from the
/// pair table directly rather than from entropies.
pub fn mutual_information<T: Real>(joint: &ProbabilityTable<T>, a: usize, b: usize) -> Result<T> {
    let pair = joint.marginalize_positions(&[a, b])?;
    let pa = pair.marginalize_positions(&[0])?;
    let pb = pair.marginalize_positions(&[1])?;
    let cb = pb.len();
    let mut acc = KahanSum::new();
    for (flat, &p) in pair.masses().iter().enumerate() {
        if p > T::zero() {
            let q = pa.masses()[flat / cb] * pb.masses()[flat % cb];
            acc.add(p * (p / q).ln());
        }
    }
    Ok(acc.value())
}

/// Checks that `edges` form a spanning tree over `n` variables.
fn validate_tree(n: usize, edges: &[(usize, usize)]) -> Result<()> {
    if edges.len() + 1 != n {
        return Err(Error::NotATree(format!(
            "{} edges cannot span {n} variables as a tree",
            edges.len()
        )));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::UnknownVariable(format!("#{}", a.max(b))));
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(Error::NotATree(format!("edge ({a}, {b}) closes a cycle")));
        }
        parent[ra] = rb;
    }
    Ok(())
}

/// `sum_edges S[pair] - sum_nodes (deg - 1) S[node]` for a spanning tree
/// given as pairs of variable positions.
pub fn bethe_breakdown<T: Real>(
    joint: &ProbabilityTable<T>,
    tree: &[(usize, usize)],
) -> Result<EntropyBreakdown<T>> {
    let n = joint.variables().len();
    validate_tree(n, tree)?;
    let mut degree = vec![0usize; n];
    let mut terms = Vec::new();
    for &(a, b) in tree {
        degree[a] += 1;
        degree[b] += 1;
        terms.push(term(joint, &[a, b], T::one())?);
    }
    for (v, &d) in degree.iter().enumerate() {
        if d != 1 {
            terms.push(term(joint, &[v], T::one() - T::lit(d as f64))?);
        }
    }
    Ok(EntropyBreakdown::from_terms(terms))
}

pub fn tree_bethe_entropy<T: Real>(joint: &ProbabilityTable<T>, tree: &[(usize, usize)]) -> Result<T> {
    Ok(bethe_breakdown(joint, tree)?.total)
}

/// Signed sum over every simplex of `complex`: `(-1)^r M S` for
/// [`MultiplicityMode::PaperCount`], `c S` for
/// [`MultiplicityMode::MoebiusCount`]. Vertices are variable positions.
pub fn kikuchi_breakdown<T: Real>(
    joint: &ProbabilityTable<T>,
    complex: &SimplicialComplex,
) -> Result<EntropyBreakdown<T>> {
    let n = joint.variables().len();
    if let Some(&bad) = complex.vertices().iter().find(|&&v| v >= n) {
        return Err(Error::InvalidComplex(format!(
            "vertex {bad} is not a variable of the {n}-variable table"
        )));
    }
    let mut simplices: Vec<(&Vec<usize>, i64)> =
        complex.multiplicities().iter().map(|(s, &m)| (s, m)).collect();
    simplices.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
    let mut terms = Vec::with_capacity(simplices.len());
    for (s, m) in simplices {
        let coefficient = match complex.mode() {
            MultiplicityMode::PaperCount if s.len() % 2 == 0 => -m,
            _ => m,
        };
        terms.push(term(joint, s, T::lit(coefficient as f64))?);
    }
    Ok(EntropyBreakdown::from_terms(terms))
}

pub fn kikuchi_entropy<T: Real>(joint: &ProbabilityTable<T>, complex: &SimplicialComplex) -> Result<T> {
    Ok(kikuchi_breakdown(joint, complex)?.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::Variable;

    fn table(cards: &[usize], weights: &[f64]) -> ProbabilityTable<f64> {
        let vars = cards
            .iter()
            .enumerate()
            .map(|(i, &c)| Variable::new(format!("v{i}"), c))
            .collect();
        ProbabilityTable::from_weights(vars, weights.to_vec()).unwrap()
    }

    #[test]
    fn shannon_examples() {
        let u = table(&[4], &[1.0; 4]);
        assert!((shannon(&u).unwrap() - 4f64.ln()).abs() < 1e-15);
        let d = table(&[3], &[0.0, 1.0, 0.0]);
        assert_eq!(shannon(&d).unwrap(), 0.0);
        let a = table(&[2], &[0.3, 0.7]);
        let b = table(&[3], &[0.2, 0.5, 0.3]);
        let ab = a.product(&b.renamed(&["w"]).unwrap()).unwrap();
        let sum = shannon(&a).unwrap() + shannon(&b).unwrap();
        assert!((shannon(&ab).unwrap() - sum).abs() < 1e-12);
    }

    #[test]
    fn two_variable_chain_is_mutual_information() {
        let t = table(&[2, 3], &[0.1, 0.2, 0.05, 0.3, 0.15, 0.2]);
        let chain = paper_chain_entropy(&t).unwrap();
        let mi = mutual_information(&t, 0, 1).unwrap();
        assert!((chain - mi).abs() < 1e-14);
        assert!(chain >= 0.0);
    }

    #[test]
    fn independent_chain_is_zero() {
        let a = table(&[2], &[0.4, 0.6]);
        let b = table(&[2], &[0.1, 0.9]).renamed(&["b"]).unwrap();
        let c = table(&[3], &[0.2, 0.2, 0.6]).renamed(&["c"]).unwrap();
        let abc = a.product(&b).unwrap().product(&c).unwrap();
        let d = chain_decomposition(&abc).unwrap();
        assert!(d.mutual_informations.iter().all(|m| m.abs() < 1e-12));
        // interior entropy survives: chain = -S[b]
        let sb = shannon(&b).unwrap();
        assert!((d.chain_entropy + sb).abs() < 1e-12);
        assert!((d.recombined() - d.chain_entropy).abs() < 1e-12);
    }

    #[test]
    fn bethe_single_edge_and_cycle() {
        let t = table(&[2, 2], &[0.1, 0.2, 0.3, 0.4]);
        let s = shannon(&t).unwrap();
        assert!((tree_bethe_entropy(&t, &[(0, 1)]).unwrap() - s).abs() < 1e-15);
        let t3 = table(&[2, 2, 2], &[1.0; 8]);
        assert!(matches!(
            tree_bethe_entropy(&t3, &[(0, 1), (1, 0)]),
            Err(Error::NotATree(_))
        ));
        assert!(tree_bethe_entropy(&t3, &[(0, 1)]).is_err());
    }

    #[test]
    fn kikuchi_lone_edge_paper_count() {
        // vertices carry M = 2 (themselves and the edge), the edge M = 1
        let a = table(&[2], &[0.25, 0.75]);
        let b = table(&[2], &[0.6, 0.4]).renamed(&["b"]).unwrap();
        let ab = a.product(&b).unwrap();
        let k = SimplicialComplex::from_simplices([[0, 1]]).unwrap();
        let (sa, sb) = (shannon(&a).unwrap(), shannon(&b).unwrap());
        let expected = 2.0 * sa + 2.0 * sb - shannon(&ab).unwrap();
        assert!((kikuchi_entropy(&ab, &k).unwrap() - expected).abs() < 1e-14);
        assert!((expected - (sa + sb)).abs() < 1e-14);
    }

    #[test]
    fn kikuchi_rejects_foreign_vertex() {
        let t = table(&[2, 2], &[1.0; 4]);
        let k = SimplicialComplex::from_simplices([[0, 2]]).unwrap();
        assert!(kikuchi_entropy(&t, &k).is_err());
    }
}
