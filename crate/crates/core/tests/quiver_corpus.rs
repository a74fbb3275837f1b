use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slag_core::quiver::{betti, cycle_cover, edge_removal_profile, glued_topology, EdgeRemoval, Quiver, Shape};
use slag_core::foundations::AngleClass;

fn random_quiver(rng: &mut ChaCha8Rng) -> Quiver {
    let v = rng.random_range(1..=12);
    let e = rng.random_range(0..=30);
    let edges = (0..e).map(|_| (rng.random_range(0..v), rng.random_range(0..v))).collect();
    Quiver::unlabelled(v, edges).unwrap()
}

fn corpus() -> Vec<Quiver> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..500).map(|_| random_quiver(&mut rng)).collect()
}

/// Weak components by union-find.
fn components(q: &Quiver) -> usize {
    let mut parent: Vec<usize> = (0..q.vertex_count()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(s, t) in q.edges() {
        let (a, b) = (find(&mut parent, s), find(&mut parent, t));
        parent[a] = b;
    }
    (0..q.vertex_count()).filter(|&x| find(&mut parent, x) == x).count()
}

/// Directed reachability by depth-first search.
fn reaches(q: &Quiver, from: usize, to: usize) -> bool {
    let mut seen = vec![false; q.vertex_count()];
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        stack.extend(q.edges().iter().filter(|e| e.0 == v).map(|e| e.1));
    }
    false
}

#[test]
fn euler_identity_and_components() {
    for q in corpus() {
        let b = betti(&q);
        assert_eq!(b.h0 as i64 - b.h1 as i64, q.vertex_count() as i64 - q.edge_count() as i64);
        assert_eq!(b.h0, components(&q));
    }
}

#[test]
fn cover_matches_reachability_oracle() {
    for q in corpus() {
        let cert = cycle_cover(&q);
        cert.validate(&q).unwrap();
        for (h, &(s, t)) in q.edges().iter().enumerate() {
            assert_eq!(cert.covered[h], reaches(&q, t, s), "edge {h} of {q:?}");
        }
        if cert.cover {
            assert!(cert.kernel_vector.iter().all(|&a| a > 0));
            assert!(q.apply_boundary(&cert.kernel_vector).iter().all(|&x| x == 0));
        }
        assert_eq!(cycle_cover(&q.reversed()).cover, cert.cover);
    }
}

#[test]
fn edge_removal_has_one_of_two_profiles() {
    for q in corpus() {
        let b = betti(&q);
        for h in 0..q.edge_count() {
            match edge_removal_profile(&q, h).unwrap() {
                EdgeRemoval::BridgeLike { h0, h1 } => assert_eq!((h0, h1), (b.h0 + 1, b.h1)),
                EdgeRemoval::CycleEdge { h0, h1 } => assert_eq!((h0, h1), (b.h0, b.h1 - 1)),
            }
        }
    }
}

#[test]
fn topology_counts_and_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for q in corpus() {
        if betti(&q).h0 != 1 {
            continue;
        }
        let labels: Vec<(Shape, AngleClass)> = (0..q.vertex_count())
            .map(|_| {
                let shape = if rng.random_bool(0.5) { Shape::ProjectiveSpace(2) } else { Shape::ProductOfLines(2) };
                (shape, AngleClass::new(rng.random_range(0..4), 2).unwrap())
            })
            .collect();
        let e = glued_topology(&q, &labels, 2).unwrap();
        assert_eq!(e.summand_count(), q.vertex_count());
        assert_eq!(e.handles, betti(&q).h1);

        let v = q.vertex_count();
        let perm: Vec<usize> = (0..v).map(|i| (i * 5 + 3) % v).collect();
        if (0..v).all(|i| perm.contains(&i)) {
            let edges = q.edges().iter().map(|&(s, t)| (perm[s], perm[t])).collect();
            let relabeled = Quiver::unlabelled(v, edges).unwrap();
            let mut moved = labels.clone();
            for (i, l) in labels.iter().enumerate() {
                moved[perm[i]] = l.clone();
            }
            assert_eq!(glued_topology(&relabeled, &moved, 2).unwrap(), e);
        }
        checked += 1;
    }
    assert!(checked > 20);
}
