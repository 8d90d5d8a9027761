use super::*;
use crate::verify::verify_family;

fn v(s: &str) -> Vertex {
    s.parse().unwrap()
}

fn cube(n: u32) -> AugmentedCube {
    AugmentedCube::new(n).unwrap()
}

fn triples(n: u32) -> impl Iterator<Item = [Vertex; 3]> {
    let c = cube(n);
    let all: Vec<Vertex> = c.vertices().collect();
    let m = all.len();
    (0..m).flat_map(move |i| {
        let all = all.clone();
        (i + 1..m).flat_map(move |j| {
            let all = all.clone();
            (j + 1..m).map(move |k| [all[i], all[j], all[k]])
        })
    })
}

#[test]
fn rejects_bad_terminal_sets() {
    let c = cube(5);
    let opts = Options::default();
    assert!(matches!(construct(&c, &[v("00000"), v("00001")], &opts), Err(ConstructError::InvalidTerminals { .. })));
    assert!(matches!(
        construct(&c, &[v("00000"), v("00000"), v("00011")], &opts),
        Err(ConstructError::InvalidTerminals { .. })
    ));
    assert!(matches!(
        construct(&c, &[v("00000"), v("0001"), v("00011")], &opts),
        Err(ConstructError::InvalidTerminals { .. })
    ));
    let small = AugmentedCube::new(2).unwrap();
    assert_eq!(
        construct(&small, &[v("00"), v("01"), v("11")], &opts),
        Err(ConstructError::DimensionTooSmall(2))
    );
}

#[test]
fn classification_normalizes_to_at_most_one_upper_terminal() {
    let c = cube(5);
    for s in triples(5) {
        let class = classify(&c, &s).unwrap();
        let upper = s.iter().filter(|u| class.normalization.apply(**u).bit(1)).count();
        assert!(upper <= 1, "{s:?}");
        let roles: BTreeSet<Vertex> = [class.roles.x, class.roles.y, class.roles.z].into();
        let normalized: BTreeSet<Vertex> = s.iter().map(|&u| class.normalization.apply(u)).collect();
        assert_eq!(roles, normalized);
        assert_eq!(class.tag == CaseTag::Case1, upper == 0);
        if class.tag != CaseTag::Case1 {
            assert!(class.roles.z.bit(1));
        }
    }
}

#[test]
fn classification_examples() {
    let c = cube(5);
    // z = x^h with x and y not adjacent.
    let s = [v("00000"), v("00110"), v("10000")];
    assert_eq!(classify(&c, &s).unwrap().tag, CaseTag::Case2_1_2);
    // x ~ y with swapped images: z = x^h = y^c.
    let s = [v("00000"), v("01111"), v("10000")];
    let class = classify(&c, &s).unwrap();
    assert_eq!(class.tag, CaseTag::Case2_1_1);
    assert_eq!(class.map, Some(SideMap::H));
    // Three terminals in the 1-copy are complemented into the 0-copy.
    let s = [v("10000"), v("10001"), v("11000")];
    let class = classify(&c, &s).unwrap();
    assert_eq!((class.tag, class.normalization), (CaseTag::Case1, Normalization::Complement));
}

#[test]
fn every_configuration_at_n5_verifies_without_fallback() {
    let c = cube(5);
    let opts = Options { fallback: false, ..Options::default() };
    let mut seen = BTreeSet::new();
    for s in triples(5) {
        let family = construct(&c, &s, &opts).unwrap_or_else(|e| panic!("{s:?}: {e}"));
        assert_eq!(family.trees.len(), 7);
        assert!(!family.fallback_used);
        assert!(verify_family(&c, &family).accepted, "{s:?}");
        seen.insert(family.case().unwrap());
    }
    assert!(seen.contains(&CaseTag::Case1));
    assert!(seen.contains(&CaseTag::Case2_1_2));
}

#[test]
fn base_cases_reach_the_packing_number() {
    for n in [3, 4] {
        let c = cube(n);
        for s in triples(n) {
            let family = construct(&c, &s, &Options::default()).unwrap();
            assert_eq!(family.trees.len(), (2 * n - 3) as usize);
            assert!(verify_family(&c, &family).accepted);
            if n == 3 {
                assert_eq!(family.case(), Some(CaseTag::Base3));
            }
            assert!(!family.fallback_used);
        }
    }
}

#[test]
fn case1_provenance_ends_with_two_quarter_trees() {
    let c = cube(6);
    let s = [v("000000"), v("000011"), v("010101")];
    let family = construct(&c, &s, &Options::default()).unwrap();
    let last = family.provenance.last().unwrap();
    assert_eq!((last.tag, last.first, last.count), (CaseTag::Case1, 7, 2));
    for tree in &family.trees[7..] {
        assert!(tree.inner_vertices().iter().all(|u| u.bit(1)));
    }
}

#[test]
fn fidelity_mode_uses_hamiltonian_connectors() {
    let c = cube(5);
    let s = [v("00000"), v("00011"), v("01010")];
    let opts = Options { fidelity: true, ..Options::default() };
    let family = construct(&c, &s, &opts).unwrap();
    assert!(verify_family(&c, &family).accepted);
    for tree in &family.trees[family.trees.len() - 2..] {
        // A Hamiltonian path of an 8-vertex quarter plus three pendant edges.
        assert_eq!(tree.inner_vertices().len(), 8);
    }
}

#[test]
fn sub_builders_check_the_case() {
    let c = cube(5);
    let opts = Options::default();
    let upper_image = [v("00000"), v("00110"), v("10000")];
    let all_lower = [v("00000"), v("00011"), v("01010")];
    assert!(construct_case2_image(&c, &upper_image, &opts).is_ok());
    assert!(matches!(
        construct_case2_nonimage(&c, &upper_image, &opts),
        Err(ConstructError::TagMismatch { found: CaseTag::Case2_1_2, .. })
    ));
    assert!(construct_case1(&c, &all_lower, &opts).is_ok());
    assert!(matches!(construct_case1(&c, &upper_image, &opts), Err(ConstructError::TagMismatch { .. })));
}

#[test]
fn fallback_completes_a_damaged_family() {
    let c = cube(5);
    let s = [v("00000"), v("00110"), v("10000")];
    let class = classify(&c, &s).unwrap();
    let mut partial = construct(&c, &s, &Options::default()).unwrap();
    partial.trees.truncate(4);
    let family = fallback(&c, s, &class, Some(partial.clone()), &Options::default()).unwrap();
    assert!(family.fallback_used);
    assert_eq!(family.case(), Some(CaseTag::FallbackSearch));
    assert_eq!(family.trees.len(), 7);
    assert_eq!(family.trees[..4], partial.trees[..]);
    assert!(verify_family(&c, &family).accepted);
}

#[test]
fn base_results_are_translation_invariant() {
    let c = cube(4);
    let s = [v("0000"), v("0011"), v("0101")];
    let shift = 0b1011;
    let moved = s.map(|u| u.translate(shift));
    let a = base_case_search(&c, &s, 5).unwrap();
    let b = base_case_search(&c, &moved, 5).unwrap();
    let a_moved = a.map(|u| u.translate(shift));
    let mut lhs: Vec<_> = a_moved.trees.clone();
    let mut rhs: Vec<_> = b.trees.clone();
    lhs.sort_by(|p, q| p.edges.cmp(&q.edges));
    rhs.sort_by(|p, q| p.edges.cmp(&q.edges));
    assert_eq!(lhs, rhs);
}

#[test]
fn embed_lifts_into_the_requested_copy() {
    let c = cube(4);
    let s = [v("0000"), v("0011"), v("0101")];
    let family = construct(&c, &s, &Options::default()).unwrap();
    let lifted = embed(&family, true);
    assert_eq!(lifted.dim, 5);
    assert!(lifted.trees.iter().flat_map(|t| t.vertices()).all(|u| u.bit(1) && u.dim() == 5));
    assert!(verify_family(&cube(5), &lifted).accepted);
}

#[test]
fn case_tags_round_trip_through_names() {
    for tag in CaseTag::ALL {
        assert_eq!(tag.name().parse::<CaseTag>().unwrap(), tag);
    }
    assert!("Case9".parse::<CaseTag>().is_err());
}

#[test]
fn dimension_four_prefers_the_recipes() {
    let c = cube(4);
    let opts = Options::default();
    let image = construct(&c, &[v("0000"), v("0011"), v("1100")], &opts).unwrap();
    assert!(image.case().unwrap().is_image_case(), "{:?}", image.case());
    let family = construct_case2_image(&c, &[v("0000"), v("0111"), v("1000")], &opts).unwrap();
    assert_eq!(family.trees.len(), 5);
    assert_eq!(classify(&c, &[v("0000"), v("0001"), v("0010")]).unwrap().tag, CaseTag::Case1);
    assert!(classify(&c, &[v("0000"), v("0011"), v("1110")]).unwrap().tag.is_nonimage_case());
}
