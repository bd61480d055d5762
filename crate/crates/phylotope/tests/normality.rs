//! Cross-checks between the semigroup path (distinct vertex sums) and the
//! polyhedral path (lattice points of the dilated polytope): the counts
//! agree exactly when the model polytope is normal with respect to its
//! vertex-generated lattice.

use num_bigint::BigInt;
use phylotope::abelian::FiniteAbelianGroup;
use phylotope::hilbert::{fiber_table, hilbert_value, CountOptions, Multidegree};
use phylotope::lattice::lattice_from_vertices;
use phylotope::model::ModelPolytope;
use phylotope::polyhedra::{
    contains, count_slices, enumerate_lattice_points, EnumOptions, SliceConstraint, VPolytope,
};
use phylotope::tree::{RootSpec, RootedPhyloTree};

fn setup(text: &str, root: u32, group: &str) -> (ModelPolytope, VPolytope, phylotope::lattice::LatticeBasis) {
    let tree = RootedPhyloTree::parse(text, Some(&RootSpec::Leaf(root))).unwrap();
    let g: FiniteAbelianGroup = group.parse().unwrap();
    let model = ModelPolytope::new(tree, g).unwrap();
    let rows = model.vertex_rows(1 << 20).unwrap();
    let polytope = VPolytope::from_byte_rows(&rows).unwrap();
    let basis = lattice_from_vertices(
        rows.iter()
            .map(|r| r.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()),
    )
    .unwrap();
    (model, polytope, basis)
}

#[test]
fn first_dilation_recovers_the_vertices() {
    let (model, polytope, basis) = setup("((1,2),3);", 3, "Z2xZ2");
    let points =
        enumerate_lattice_points(&polytope, 1, &basis, &[], &EnumOptions::default()).unwrap();
    assert_eq!(points.len(), 16);
    let mut expected: Vec<Vec<BigInt>> = model
        .vertex_rows(1 << 20)
        .unwrap()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let mut got = points;
    expected.sort();
    got.sort();
    assert_eq!(got, expected);
}

#[test]
fn lattice_counts_match_distinct_sum_counts() {
    let opts = CountOptions::default();
    let enum_opts = EnumOptions::default();
    for (text, root, group, max_n) in [
        ("((1,2),3);", 3u32, "Z2", 3u32),
        ("((1,2),3);", 3, "Z2xZ2", 3),
        ("(((1,2),3),4);", 4, "Z2", 3),
    ] {
        let tree = RootedPhyloTree::parse(text, Some(&RootSpec::Leaf(root))).unwrap();
        let g: FiniteAbelianGroup = group.parse().unwrap();
        let model = ModelPolytope::new(tree, g).unwrap();
        let rows = model.vertex_rows(1 << 20).unwrap();
        let polytope = VPolytope::from_byte_rows(&rows).unwrap();
        let basis = lattice_from_vertices(
            rows.iter()
                .map(|r| r.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()),
        )
        .unwrap();
        for n in 1..=max_n {
            let semigroup = hilbert_value(&model, n, &opts).unwrap();
            let lattice = count_slices(&polytope, n, &basis, &[], &enum_opts).unwrap();
            assert_eq!(semigroup, lattice, "{text} over {group} at n={n}");
        }
    }
}

#[test]
fn sliced_counts_match_fiber_table_cells() {
    let (model, polytope, basis) = setup("((1,2),3);", 3, "Z2xZ2");
    let root_edge = model.tree().root_edge();
    let socket = ("e".to_string(), root_edge.clone());
    let offset = model.block_offset(&root_edge).unwrap();
    let n = 1u32;
    let table = fiber_table(&model, n, &[socket], &CountOptions::default()).unwrap();

    // Every unit multidegree cell counts 4; the sliced lattice counts agree.
    for h in 0..4usize {
        let u = Multidegree::unit(4, h);
        let cell = table.get(std::slice::from_ref(&u));
        let slice = SliceConstraint::new(
            offset,
            u.values().iter().map(|&v| BigInt::from(v)).collect(),
        );
        let sliced =
            count_slices(&polytope, n, &basis, &[slice], &EnumOptions::default()).unwrap();
        assert_eq!(cell, num_bigint::BigUint::from(4u32));
        assert_eq!(sliced, cell);
    }
}

#[test]
fn slice_totals_partition_the_count() {
    let (model, polytope, basis) = setup("((1,2),3);", 3, "Z2");
    let root_edge = model.tree().root_edge();
    let offset = model.block_offset(&root_edge).unwrap();
    let n = 2u32;
    let total = count_slices(&polytope, n, &basis, &[], &EnumOptions::default()).unwrap();
    let mut summed = num_bigint::BigUint::from(0u32);
    for u in Multidegree::all_with_total(2, n) {
        let slice = SliceConstraint::new(
            offset,
            u.values().iter().map(|&v| BigInt::from(v)).collect(),
        );
        summed += count_slices(&polytope, n, &basis, &[slice], &EnumOptions::default()).unwrap();
    }
    assert_eq!(summed, total);
    // A slice whose total is not n is empty on nP.
    let bad = SliceConstraint::new(offset, vec![BigInt::from(n), BigInt::from(1)]);
    let empty = count_slices(&polytope, n, &basis, &[bad], &EnumOptions::default()).unwrap();
    assert_eq!(empty, num_bigint::BigUint::from(0u32));
}

#[test]
fn every_pair_sum_is_a_lattice_point_of_the_double_dilation() {
    let (model, polytope, basis) = setup("((1,2),3);", 3, "Z2xZ2");
    let rows = model.vertex_rows(1 << 20).unwrap();
    for i in 0..rows.len() {
        for j in i..rows.len() {
            let sum: Vec<BigInt> = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(&a, &b)| BigInt::from(a) + BigInt::from(b))
                .collect();
            assert!(contains(&polytope, 2, &sum, &[]).unwrap());
            assert!(basis.to_lattice_coords(&sum).unwrap().is_some());
        }
    }
}
