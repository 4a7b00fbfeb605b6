mod common;

use common::*;
use pathboltz::entropy::{
    chain_decomposition, kikuchi_breakdown, kikuchi_entropy, marginalize, mutual_information,
    paper_chain_entropy, shannon, tree_bethe_entropy, MultiplicityMode, ProbabilityTable,
    SimplicialComplex, Variable,
};
use pathboltz::path_integral::{path_distribution, Endpoints};
use proptest::prelude::*;
use rand::Rng as _;

fn random_table(rng: &mut pathboltz::rng::Rng, cards: &[usize]) -> ProbabilityTable<f64> {
    let vars = cards
        .iter()
        .enumerate()
        .map(|(i, &c)| Variable::new(format!("v{i}"), c))
        .collect();
    let len = cards.iter().product();
    let weights = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    ProbabilityTable::from_weights(vars, weights).unwrap()
}

fn naive_entropy(masses: &[f64]) -> f64 {
    -masses.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

#[test]
fn marginalize_matches_nested_sums() {
    let mut rng = rng(30);
    let joint = random_table(&mut rng, &[2, 3, 4]);
    let m = marginalize(&joint, &["v0", "v2"]).unwrap();
    for a in 0..2 {
        for c in 0..4 {
            let mut sum = 0.0;
            for b in 0..3 {
                sum += joint.masses()[(a * 3 + b) * 4 + c];
            }
            assert!((m.mass(&[a, c]).unwrap() - sum).abs() <= 1e-15);
        }
    }
    // keep order follows the request
    let swapped = marginalize(&joint, &["v2", "v0"]).unwrap();
    assert!((swapped.mass(&[3, 1]).unwrap() - m.mass(&[1, 3]).unwrap()).abs() == 0.0);
}

#[test]
fn chain_identity_on_random_joints() {
    let mut rng = rng(31);
    for _ in 0..20 {
        let joint = random_table(&mut rng, &[2, 3, 2]);
        let d = chain_decomposition(&joint).unwrap();
        assert!((d.recombined() - d.chain_entropy).abs() <= 1e-12);
        // independent oracle straight from the pair and single masses
        let s = |keep: &[&str]| naive_entropy(joint.marginalize(keep).unwrap().masses());
        let expected = s(&["v0"]) + s(&["v1"]) + s(&["v2"]) - s(&["v0", "v1"]) - s(&["v1", "v2"]);
        assert!((paper_chain_entropy(&joint).unwrap() - expected).abs() <= 1e-12);
        let mi = s(&["v0"]) + s(&["v1"]) - s(&["v0", "v1"]);
        assert!((mutual_information(&joint, 0, 1).unwrap() - mi).abs() <= 1e-12);
    }
}

#[test]
fn bethe_is_exact_on_markov_chains() {
    let mut rng = rng(32);
    for dims in [[2, 2, 2, 2], [2, 3, 2, 3], [3, 2, 4, 2]] {
        let chain = positive_chain(&mut rng, &dims);
        let joint = path_distribution(&chain, Endpoints::Free).unwrap();
        let edges: Vec<(usize, usize)> = (0..dims.len() - 1).map(|i| (i, i + 1)).collect();
        let exact = naive_entropy(joint.masses());
        let bethe = tree_bethe_entropy(&joint, &edges).unwrap();
        assert!((bethe - exact).abs() <= 1e-10, "{bethe} vs {exact}");
        let first = shannon(&joint.marginalize_positions(&[0]).unwrap()).unwrap();
        let last = shannon(&joint.marginalize_positions(&[dims.len() - 1]).unwrap()).unwrap();
        let chain_formula = paper_chain_entropy(&joint).unwrap();
        assert!((chain_formula - (first + last - bethe)).abs() <= 1e-10);

        let edge_complex = SimplicialComplex::from_simplices(edges.iter().map(|&(a, b)| vec![a, b]))
            .unwrap()
            .with_multiplicities(MultiplicityMode::MoebiusCount);
        assert!((kikuchi_entropy(&joint, &edge_complex).unwrap() - bethe).abs() <= 1e-12);
    }
}

#[test]
fn triangle_expansion_by_hand() {
    let mut rng = rng(33);
    let joint = random_table(&mut rng, &[2, 2, 2]);
    let s = |keep: &[&str]| naive_entropy(joint.marginalize(keep).unwrap().masses());
    let singles = s(&["v0"]) + s(&["v1"]) + s(&["v2"]);
    let pairs = s(&["v0", "v1"]) + s(&["v0", "v2"]) + s(&["v1", "v2"]);
    let whole = s(&["v0", "v1", "v2"]);

    let complex = SimplicialComplex::from_simplices([vec![0, 1, 2]]).unwrap();
    // each vertex lies in 4 faces, each edge in 2, the triangle in 1
    let paper = kikuchi_entropy(&joint, &complex).unwrap();
    assert!((paper - (4.0 * singles - 2.0 * pairs + whole)).abs() <= 1e-12);

    let moebius = kikuchi_entropy(&joint, &complex.with_multiplicities(MultiplicityMode::MoebiusCount)).unwrap();
    assert!((moebius - whole).abs() <= 1e-12);
}

#[test]
fn strip_of_triangles_breakdown() {
    let mut rng = rng(34);
    let joint = random_table(&mut rng, &[2, 2, 2, 2, 2]);
    let complex = SimplicialComplex::from_simplices([vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
    assert_eq!(complex.counts_by_rank(), vec![5, 7, 3]);
    let breakdown = kikuchi_breakdown(&joint, &complex).unwrap();
    assert_eq!(breakdown.terms.len(), 15);
    let total: f64 = breakdown.terms.iter().map(|t| t.contribution).sum();
    assert!((total - breakdown.total).abs() <= 1e-12);
    for t in &breakdown.terms {
        assert!((t.contribution - t.coefficient * t.entropy).abs() <= 1e-15);
    }

    // Moebius counts on a strip reproduce the junction-tree entropy
    let moebius = kikuchi_entropy(&joint, &complex.with_multiplicities(MultiplicityMode::MoebiusCount)).unwrap();
    let s = |keep: &[&str]| naive_entropy(joint.marginalize(keep).unwrap().masses());
    let junction = s(&["v0", "v1", "v2"]) + s(&["v1", "v2", "v3"]) + s(&["v2", "v3", "v4"])
        - s(&["v1", "v2"])
        - s(&["v2", "v3"]);
    assert!((moebius - junction).abs() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shannon_bounds(weights in proptest::collection::vec(0.0f64..1.0, 2..32)) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-3);
        let n = weights.len();
        let t = ProbabilityTable::from_weights(vec![Variable::new("x", n)], weights).unwrap();
        let s = shannon(&t).unwrap();
        prop_assert!(s >= 0.0 && s <= (n as f64).ln() + 1e-12);
        prop_assert!((s - naive_entropy(t.masses())).abs() <= 1e-12);
    }

    #[test]
    fn mutual_information_nonnegative(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let joint = random_table(&mut rng, &[3, 2, 2]);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            prop_assert!(mutual_information(&joint, a, b).unwrap() >= -1e-14);
        }
    }

    #[test]
    fn subadditivity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let joint = random_table(&mut rng, &[2, 3]);
        let sa = shannon(&joint.marginalize(&["v0"]).unwrap()).unwrap();
        let sb = shannon(&joint.marginalize(&["v1"]).unwrap()).unwrap();
        prop_assert!(shannon(&joint).unwrap() <= sa + sb + 1e-12);
    }
}
