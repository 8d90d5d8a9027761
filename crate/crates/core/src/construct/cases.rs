//! Recipes for the inductive cases. All recipes work in normalized
//! coordinates: at most one terminal has leading bit 1.

use std::collections::BTreeSet;

use super::{construct, embed, Batch, Built, CaseTag, Classification, Options, SteinerTree};
use crate::paths::{connector_tree, disjoint_paths, hamiltonian_path, map_path_system, reorder_paths, Path, PathSystem};
use crate::topology::{AugmentedCube, Edge, GraphView, Prefix, SideMap, SubCube, Vertex};

type Recipe<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn partner(map: SideMap, v: Vertex) -> Vertex {
    map.partner(v).expect("n >= 2")
}

fn path_edges(p: &Path) -> Vec<Edge> {
    p.edges().collect()
}

pub(super) fn case1(cube: &AugmentedCube, t: [Vertex; 3], class: &Classification, opts: &Options) -> Recipe<Built> {
    let n = cube.dim();
    let lower = AugmentedCube::new(n - 1).map_err(err)?;
    let stripped: Vec<Vertex> = t.iter().map(|v| v.strip_leading()).collect::<Result<_, _>>().map_err(err)?;
    let inner = construct(&lower, &stripped, opts).map_err(err)?;
    let inner = embed(&inner, false);

    let mut trees = inner.trees;
    let mut provenance = inner.provenance;
    let first = trees.len();
    for quarter in [0b10u64, 0b11] {
        let view = SubCube::new(*cube, Prefix::new(quarter, 2)).map_err(err)?;
        let attach: Vec<Vertex> = t
            .iter()
            .map(|&s| {
                [SideMap::H, SideMap::C]
                    .into_iter()
                    .map(|m| partner(m, s))
                    .find(|&img| view.contains(img))
                    .expect("exactly one image per quarter")
            })
            .collect();
        let mut edges = if opts.fidelity {
            // Two terminals may share an attachment point; at least two stay distinct.
            let ends: BTreeSet<Vertex> = attach.iter().copied().collect();
            let mut ends = ends.into_iter();
            let (from, to) = (ends.next().expect("nonempty"), ends.next().ok_or("attachments collapsed")?);
            let path = hamiltonian_path(&view, from, to, opts.hamilton_budget)
                .map_err(err)?
                .ok_or_else(|| format!("quarter {quarter:02b} has no Hamiltonian {from}-{to} path"))?;
            path_edges(&path)
        } else {
            connector_tree(&view, &attach).map_err(err)?
        };
        edges.extend(t.iter().zip(&attach).map(|(&s, &a)| Edge::new(s, a)));
        trees.push(SteinerTree::new(t, edges));
    }
    provenance.push(Batch {
        tag: CaseTag::Case1,
        normalization: class.normalization,
        roles: Some(class.roles),
        first,
        count: 2,
    });
    Ok(Built { trees, provenance })
}

/// The two copies of AQ_{n-1} and the number of paths each must carry.
struct Halves {
    zero: SubCube,
    one: SubCube,
    k: usize,
}

impl Halves {
    fn new(cube: &AugmentedCube) -> Recipe<Halves> {
        let n = cube.dim();
        if n < 4 {
            return Err(format!("AQ_{} is not {}-connected", n - 1, 2 * n - 3));
        }
        Ok(Halves {
            zero: SubCube::new(*cube, Prefix::new(0, 1)).map_err(err)?,
            one: SubCube::new(*cube, Prefix::new(1, 1)).map_err(err)?,
            k: (2 * n - 3) as usize,
        })
    }

    fn system<G: GraphView>(view: &G, a: Vertex, b: Vertex, k: usize) -> Recipe<PathSystem> {
        disjoint_paths(view, a, b, k)
            .map_err(err)?
            .into_paths()
            .ok_or_else(|| format!("fewer than {k} disjoint {a}-{b} paths"))
    }

    fn lower(&self, a: Vertex, b: Vertex) -> Recipe<PathSystem> {
        Self::system(&self.zero, a, b, self.k)
    }

    fn upper(&self, a: Vertex, b: Vertex) -> Recipe<PathSystem> {
        Self::system(&self.one, a, b, self.k)
    }
}

/// `P_i` together with `Q_i` rerouted through the matching edge at `e_i`:
/// `Q_i` leaves its hub through `map(e_i)`, which is then joined to `e_i`.
fn spliced(p: &Path, q: &Path, hub: Vertex, e_i: Vertex, map: SideMap) -> Vec<Edge> {
    let bridge = partner(map, e_i);
    let cut = Edge::new(hub, bridge);
    let mut edges = path_edges(p);
    edges.extend(q.edges().filter(|&e| e != cut));
    edges.push(Edge::new(e_i, bridge));
    edges
}

/// Pins `Q` at `hub` so that path `i` leaves through `map` of the
/// `endpoint`-neighbour of `P_i`.
fn pinned_upper(p: &PathSystem, endpoint: Vertex, q: &PathSystem, hub: Vertex, map: SideMap) -> Recipe<PathSystem> {
    let pins: Vec<(usize, Vertex)> = p
        .endpoint_neighbors(endpoint)
        .map_err(err)?
        .into_iter()
        .enumerate()
        .map(|(i, w)| (i, partner(map, w)))
        .collect();
    reorder_paths(q, hub, &pins).map_err(err)
}

fn pin(p: &PathSystem, endpoint: Vertex, pins: &[(usize, Vertex)]) -> Recipe<PathSystem> {
    reorder_paths(p, endpoint, pins).map_err(err)
}

/// Trees `first..` of the generic pattern: `P_i` plus `Q_i` spliced at
/// `map(e)` through the matching edge of `e_i`.
fn generic(t: [Vertex; 3], p: &PathSystem, q: &PathSystem, e: Vertex, map: SideMap, first: usize) -> Recipe<Vec<SteinerTree>> {
    let hub = partner(map, e);
    (first..p.len())
        .map(|i| {
            let e_i = p.neighbor_along(e, i).map_err(err)?;
            Ok(SteinerTree::new(t, spliced(&p.paths[i], &q.paths[i], hub, e_i, map)))
        })
        .collect()
}

/// `z`-side system to `map(e)`, matched to `P` at `e`.
fn matched_upper(h: &Halves, p: &PathSystem, e: Vertex, z: Vertex, map: SideMap) -> Recipe<PathSystem> {
    let hub = partner(map, e);
    let q = h.upper(z, hub)?;
    pinned_upper(p, e, &q, hub, map)
}

/// `x` and `y` non-adjacent: every tree is `P_i` spliced with `Q_i`.
fn plain(h: &Halves, t: [Vertex; 3], x: Vertex, y: Vertex, z: Vertex, map: SideMap) -> Recipe<Vec<SteinerTree>> {
    let p = h.lower(x, y)?;
    let q = matched_upper(h, &p, y, z, map)?;
    generic(t, &p, &q, y, map, 0)
}

/// `x ~ y`: the direct path `x y` is replaced by a tree through both
/// matching edges; the rest follow the generic pattern at `e`.
fn bridged(h: &Halves, t: [Vertex; 3], e: Vertex, o: Vertex, z: Vertex, map: SideMap) -> Recipe<Vec<SteinerTree>> {
    let p = pin(&h.lower(o, e)?, e, &[(0, o)])?;
    let q = matched_upper(h, &p, e, z, map)?;
    let mut first = path_edges(&q.paths[0]);
    first.push(Edge::new(o, partner(map, o)));
    first.push(Edge::new(e, partner(map, e)));
    let mut trees = vec![SteinerTree::new(t, first)];
    trees.extend(generic(t, &p, &q, e, map, 1)?);
    Ok(trees)
}

fn image_case(h: &Halves, cube: &AugmentedCube, t: [Vertex; 3], class: &Classification) -> Recipe<Vec<SteinerTree>> {
    let (x, y, z) = (class.roles.x, class.roles.y, class.roles.z);
    let map = class.map.ok_or("image case without a matching")?;
    let other = map.other();
    match class.tag {
        CaseTag::Case2_1_1 => {
            // z = map(x) = other(y), and other(x) = map(y).
            let p = pin(&h.lower(x, y)?, y, &[(0, x)])?;
            let q = map_path_system(&p, cube, |v| other.partner(v).ok()).map_err(err)?;
            let hub = partner(other, x);
            let mut trees = vec![SteinerTree::new(
                t,
                vec![Edge::new(x, hub), Edge::new(y, hub), Edge::new(hub, z)],
            )];
            for i in 1..p.len() {
                let y_i = p.neighbor_along(y, i).map_err(err)?;
                let w = q.neighbor_along(z, i).map_err(err)?;
                let mut edges = path_edges(&p.paths[i]);
                edges.push(Edge::new(y_i, w));
                edges.push(Edge::new(w, z));
                trees.push(SteinerTree::new(t, edges));
            }
            Ok(trees)
        }
        CaseTag::Case2_1_2 => {
            let p = h.lower(x, y)?;
            let q = map_path_system(&p, cube, |v| map.partner(v).ok()).map_err(err)?;
            generic(t, &p, &q, y, map, 0)
        }
        CaseTag::Case2_1_3 => {
            // x ~ y; the neighbour of x whose other-image is z closes a short tree.
            let near = partner(other, z);
            let p = pin(&h.lower(x, y)?, x, &[(0, y), (1, near)])?;
            let hub = partner(other, x);
            let q = pinned_upper(&p, x, &h.upper(hub, z)?, hub, other)?;
            let mut trees = vec![SteinerTree::new(t, {
                let mut e = path_edges(&p.paths[1]);
                e.push(Edge::new(near, z));
                e
            })];
            let mut second = path_edges(&q.paths[0]);
            second.push(Edge::new(x, hub));
            second.push(Edge::new(y, partner(other, y)));
            trees.push(SteinerTree::new(t, second));
            trees.extend(generic(t, &p, &q, x, other, 2)?);
            Ok(trees)
        }
        tag => Err(format!("{tag} is not an image case")),
    }
}

fn nonimage_case(h: &Halves, t: [Vertex; 3], class: &Classification) -> Recipe<Vec<SteinerTree>> {
    let (x, y, z) = (class.roles.x, class.roles.y, class.roles.z);
    match class.tag {
        CaseTag::Case2_2_1a => {
            // y^c = x^h and y^h = x^c; z ~ x^c.
            let xc = partner(SideMap::C, x);
            let xh = partner(SideMap::H, x);
            let p = pin(&h.lower(x, y)?, y, &[(0, x)])?;
            let q = matched_upper(h, &p, y, z, SideMap::C)?;
            let cut = Edge::new(xc, xh);
            let mut first: Vec<Edge> = q.paths[0].edges().filter(|&e| e != cut).collect();
            first.push(Edge::new(x, xc));
            first.push(Edge::new(y, xc));
            let mut trees = vec![SteinerTree::new(t, first)];
            trees.extend(generic(t, &p, &q, y, SideMap::C, 1)?);
            Ok(trees)
        }
        CaseTag::Case2_2_1b => {
            // z ~ x^h and z ~ x^c.
            let zc = partner(SideMap::C, z);
            let p = pin(&h.lower(x, y)?, y, &[(0, zc), (1, x)])?;
            let q = matched_upper(h, &p, y, z, SideMap::C)?;
            let mut first = path_edges(&p.paths[0]);
            first.push(Edge::new(zc, z));
            let mut second = path_edges(&q.paths[1]);
            second.push(Edge::new(x, partner(SideMap::H, x)));
            second.push(Edge::new(y, partner(SideMap::H, y)));
            let mut trees = vec![SteinerTree::new(t, first), SteinerTree::new(t, second)];
            trees.extend(generic(t, &p, &q, y, SideMap::C, 2)?);
            Ok(trees)
        }
        CaseTag::Case2_2_2a | CaseTag::Case2_2_2b => plain(h, t, x, y, z, SideMap::H),
        CaseTag::Case2_2_2c => plain(h, t, x, y, z, SideMap::C),
        CaseTag::Case2_2_3a => bridged(h, t, y, x, z, SideMap::H),
        CaseTag::Case2_2_3b => bridged(h, t, x, y, z, SideMap::H),
        CaseTag::Case2_2_3c => bridged(h, t, y, x, z, SideMap::C),
        tag => Err(format!("{tag} is not a non-image case")),
    }
}

pub(super) fn case2(cube: &AugmentedCube, t: [Vertex; 3], class: &Classification) -> Recipe<Built> {
    let h = Halves::new(cube)?;
    let roles: BTreeSet<Vertex> = [class.roles.x, class.roles.y, class.roles.z].into();
    if roles != t.into() {
        return Err("roles do not match the terminal set".into());
    }
    let trees = if class.tag.is_image_case() { image_case(&h, cube, t, class)? } else { nonimage_case(&h, t, class)? };
    let count = trees.len();
    let provenance = vec![Batch {
        tag: class.tag,
        normalization: class.normalization,
        roles: Some(class.roles),
        first: 0,
        count,
    }];
    Ok(Built { trees, provenance })
}
