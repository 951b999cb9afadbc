use laminath::translation_surface::*;
use laminath::{Error, Quad};

fn gamma() -> Quad {
    "-1+sqrt2".parse().unwrap()
}

fn torus() -> (TranslationSurface, Transversal) {
    let s = sheared_torus(&gamma()).unwrap();
    let t = Transversal::new(&s, "E1").unwrap();
    (s, t)
}

#[test]
fn torus_return_is_rotation() {
    let (s, t) = torus();
    let g = gamma();
    for i in 1..200 {
        let l = Quad::frac(i, 200);
        if l == &Quad::one() - &g {
            continue;
        }
        let o = first_return(&s, &t, &l, 1).unwrap();
        assert_eq!(o.end, (&l + &g).fract());
        let o3 = first_return(&s, &t, &l, 3).unwrap();
        assert_eq!(o3.end, (&l + &(&g * &Quad::from_int(3))).fract());
    }
    let o = first_return(&s, &t, &Quad::frac(1, 3), 0).unwrap();
    assert!(o.word.is_empty());
    assert_eq!(o.end, Quad::frac(1, 3));
}

#[test]
fn torus_singular_point() {
    let (s, t) = torus();
    let l = &Quad::one() - &gamma();
    match first_return(&s, &t, &l, 2) {
        Err(Error::VertexHit { step, .. }) => assert_eq!(step, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn torus_partition_depth_one() {
    let (s, t) = torus();
    let p = return_partition(&s, &t, 1).unwrap();
    assert_eq!(p.intervals.len(), 2);
    assert_eq!(p.cuts[0].lambda, &Quad::one() - &gamma());
    assert_ne!(p.intervals[0].word, p.intervals[1].word);
    assert!(saddle_connections(&s, 500).is_empty());
    let np = find_non_saddle_point(&s, &t, 500).unwrap();
    assert_eq!(np.lambda, &Quad::one() - &gamma());
}

#[test]
fn rational_torus_connects() {
    let s = sheared_torus(&Quad::frac(1, 3)).unwrap();
    let c = saddle_connections(&s, 3);
    assert!(!c.is_empty());
    assert!(c.iter().all(|c| c.word.len() <= 3 * 2));
    assert!(is_cylinder_decomposition(&s, 10));
    let t = Transversal::new(&s, "E1").unwrap();
    assert_eq!(find_non_saddle_point(&s, &t, 100), Err(Error::CylinderDecomposition));
}

#[test]
fn annulus_is_cylinder() {
    let s = square_annulus().unwrap();
    assert!(is_cylinder_decomposition(&s, 10));
    let t = Transversal::new(&s, "l").unwrap();
    assert_eq!(return_partition(&s, &t, 1), Err(Error::CylinderDecomposition));
}

#[test]
fn genus_two_partition() {
    let s = genus_two(&gamma()).unwrap();
    let t = Transversal::new(&s, "E4").unwrap();
    assert!(!is_cylinder_decomposition(&s, 200));
    let p1 = return_partition(&s, &t, 1).unwrap();
    assert_eq!(p1.intervals.len(), 1 + p1.cuts.len());
    let mut last = p1.max_len();
    for n in 2..=12 {
        let p = return_partition(&s, &t, n).unwrap();
        assert!(p.max_len() <= last);
        last = p.max_len();
    }
    let np = find_non_saddle_point(&s, &t, 1000).unwrap();
    assert!(p1.cuts.iter().any(|c| c.lambda == np.lambda));
}

#[test]
fn loops_on_fixtures() {
    let g = gamma();
    for (s, label) in [(sheared_torus(&g).unwrap(), "E1"), (genus_two(&g).unwrap(), "E4")] {
        let t = Transversal::new(&s, label).unwrap();
        for k in 2..=8 {
            let c = inadmissible_loop(&s, &t, k, DEFAULT_RETURN_BUDGET).unwrap();
            eprintln!(
                "{label} k={k} side={:?} n={} m={} len={} measure={:.3e} bound={:.3e} aligned={} bare={} lvl={}",
                c.side,
                c.n,
                c.m,
                c.word.len(),
                c.measure.to_f64(),
                c.bound().to_f64(),
                c.aligned_inadmissible,
                c.inadmissible,
                check_level_set_argument(&c)
            );
            assert!(c.measure < c.bound());
            assert!(c.aligned_inadmissible);
            assert!(check_level_set_argument(&c));
        }
    }
}
