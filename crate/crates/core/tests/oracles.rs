//! Library routines against definition-level oracles.

mod common;

use common::{avoids, ex_oracle, lx_oracle, naive_contains, naive_doubled, random_host, random_pattern, subsets, Forbidden};
use formex::formations::{
    brute_force_formation, contains_doubled_formation, contains_formation, for_each_member, max_formation_groups,
    DoubledSpec, FormationSpec,
};
use formex::matrix::occurrences;
use formex::search::{ex_exact, lx_exact, ForbiddenFamily, SearchBudget};
use formex::{contains, find_occurrence, BitMatrix, Pattern, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_shape(rng: &mut ChaCha8Rng, dims: usize, max_len: usize) -> Shape {
    Shape::new((0..dims).map(|_| rng.gen_range(1..=max_len)).collect()).unwrap()
}

/// Every occurrence as concatenated axis maps, by trying all increasing maps.
fn brute_occurrences(host: &BitMatrix, pattern: &Pattern) -> Vec<Vec<Vec<usize>>> {
    let norm = pattern.normalize().unwrap();
    let dims = host.dims();
    let choices: Vec<Vec<Vec<usize>>> = (0..dims)
        .map(|a| {
            subsets(host.shape().len(a), norm.shape().len(a))
                .into_iter()
                .map(|s| s.into_iter().map(|i| i + 1).collect())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; dims];
    if choices.iter().any(|c| c.is_empty()) {
        return out;
    }
    loop {
        let maps: Vec<Vec<usize>> = (0..dims).map(|a| choices[a][pick[a]].clone()).collect();
        let hit = norm.ones().all(|one| {
            let image: Vec<usize> = one.iter().enumerate().map(|(a, &c)| maps[a][c - 1]).collect();
            host.get(&image)
        });
        if hit {
            out.push(maps);
        }
        let mut a = dims;
        loop {
            if a == 0 {
                out.sort();
                return out;
            }
            a -= 1;
            pick[a] += 1;
            if pick[a] < choices[a].len() {
                break;
            }
            pick[a] = 0;
        }
    }
}

#[test]
fn containment_matches_definition() {
    let mut rng = rng(11);
    for case in 0..3000 {
        let dims = 1 + case % 3;
        let shape = random_shape(&mut rng, dims, if dims == 3 { 3 } else { 5 });
        let density = rng.gen_range(0.1..0.8);
        let host = random_host(&mut rng, &shape, density);
        let p = random_pattern(&mut rng, dims, 3, 4);
        assert_eq!(contains(&host, &p).unwrap(), naive_contains(&host, &p), "case {case}: {p} in {host:?}");
    }
}

#[test]
fn occurrences_match_exhaustive_maps() {
    let mut rng = rng(12);
    for case in 0..600 {
        let dims = 2 + case % 2;
        let shape = random_shape(&mut rng, dims, if dims == 3 { 3 } else { 5 });
        let density = rng.gen_range(0.2..0.9);
        let host = random_host(&mut rng, &shape, density);
        let p = random_pattern(&mut rng, dims, 3, 3);
        let brute = brute_occurrences(&host, &p);
        let mut ours: Vec<Vec<Vec<usize>>> = occurrences(&host, &p.normalize().unwrap()).unwrap().into_iter().map(|o| o.axis_maps).collect();
        ours.sort();
        assert_eq!(ours, brute, "case {case}");
        let least = find_occurrence(&host, &p).unwrap();
        assert_eq!(least.as_ref().map(|o| o.axis_maps.clone()), brute.first().cloned(), "case {case}");
        if let Some(occ) = least {
            assert!(occ.validate(&host, &p).unwrap());
        }
    }
}

#[test]
fn formation_detector_matches_brute_force() {
    let mut rng = rng(13);
    let mut positives = 0;
    for case in 0..1500 {
        let dims = 2 + case % 2;
        let mut lengths = vec![rng.gen_range(1..=7)];
        lengths.extend((1..dims).map(|_| rng.gen_range(1..=4)));
        let shape = Shape::new(lengths).unwrap();
        let density = rng.gen_range(0.2..0.7);
        let host = random_host(&mut rng, &shape, density);
        let base = random_pattern(&mut rng, dims - 1, 2, 3);
        let spec = FormationSpec::new(&base, rng.gen_range(1..=3)).unwrap();
        let fast = contains_formation(&host, &spec).unwrap();
        assert_eq!(fast, brute_force_formation(&host, &spec, common::BRUTE_CAP).unwrap(), "case {case}");
        positives += usize::from(fast);
    }
    assert!(positives > 200, "too few positive cases ({positives}) to be informative");
}

#[test]
fn greedy_group_count_is_optimal() {
    let mut rng = rng(14);
    for case in 0..400 {
        let shape = Shape::new(vec![rng.gen_range(1..=6), rng.gen_range(1..=3), rng.gen_range(1..=3)]).unwrap();
        let density = rng.gen_range(0.3..0.8);
        let host = random_host(&mut rng, &shape, density);
        let base = random_pattern(&mut rng, 2, 2, 2).normalize().unwrap();
        let greedy = max_formation_groups(&host, &base).unwrap();
        let mut exhaustive = 0;
        while brute_force_formation(&host, &FormationSpec::new(&base, exhaustive + 1).unwrap(), common::BRUTE_CAP).unwrap() {
            exhaustive += 1;
        }
        assert_eq!(greedy, exhaustive, "case {case}");
    }
}

#[test]
fn doubled_detector_matches_definition() {
    let mut rng = rng(15);
    let mut positives = 0;
    for case in 0..2000 {
        let shape = Shape::new(vec![rng.gen_range(1..=9), rng.gen_range(1..=4)]).unwrap();
        let density = rng.gen_range(0.2..0.9);
        let host = random_host(&mut rng, &shape, density);
        let (r, s) = (rng.gen_range(1..=3), rng.gen_range(2..=4));
        let fast = contains_doubled_formation(&host, &DoubledSpec::new(r, s).unwrap()).unwrap();
        assert_eq!(fast, naive_doubled(&host, r, s), "case {case}: r={r} s={s} {host:?}");
        positives += usize::from(fast);
    }
    assert!(positives > 300);
}

#[test]
fn members_are_exactly_the_minimal_formations() {
    let cases: Vec<(&str, Pattern, usize)> = vec![
        ("3x2", Pattern::all_ones_line(2).unwrap(), 2),
        ("4x3", Pattern::all_ones_line(2).unwrap(), 2),
        ("4x2", Pattern::all_ones_line(1).unwrap(), 3),
        ("3x2x2", Pattern::identity(2).unwrap(), 1),
        ("4x2x2", Pattern::from_ones(vec![vec![1, 1], vec![1, 2]]).unwrap(), 2),
    ];
    for (shape, base, s) in cases {
        let shape: Shape = shape.parse().unwrap();
        let spec = FormationSpec::new(&base, s).unwrap();
        let mut members = Vec::new();
        for_each_member(&shape, &spec, |m| members.push(m.clone())).unwrap();
        let size = spec.s() * spec.r();
        let cells: Vec<Vec<usize>> = shape.coords().collect();
        let mut expected = Vec::new();
        for idx in subsets(cells.len(), size) {
            let chosen: Vec<Vec<usize>> = idx.iter().map(|&i| cells[i].clone()).collect();
            let m = BitMatrix::from_ones(shape.clone(), &chosen).unwrap();
            if brute_force_formation(&m, &spec, common::BRUTE_CAP).unwrap() {
                expected.push(m);
            }
        }
        let key = |m: &BitMatrix| m.iter_ones().collect::<Vec<_>>();
        let mut got: Vec<_> = members.iter().map(key).collect();
        let mut want: Vec<_> = expected.iter().map(key).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "{shape} {}", spec.base());
    }
}

fn budget() -> SearchBudget {
    SearchBudget::default()
}

fn check_search(shape: &Shape, family: &ForbiddenFamily, oracle: &[Forbidden], ks: &[usize]) {
    let ex = ex_exact(shape, family, &budget()).unwrap();
    assert!(ex.is_exact());
    assert_eq!(ex.value as usize, ex_oracle(shape, oracle), "ex on {shape} for {}", family.canonical_string());
    assert!(avoids(&ex.witness, oracle));
    for &k in ks {
        let lx = lx_exact(shape, k, family, &budget()).unwrap();
        assert_eq!(lx.value as usize, lx_oracle(shape, k, oracle), "lx{k} on {shape} for {}", family.canonical_string());
        assert!(avoids(&lx.witness, oracle));
    }
}

#[test]
fn pattern_searches_match_enumeration() {
    let mut rng = rng(16);
    for _ in 0..40 {
        let shape = Shape::new(vec![rng.gen_range(1..=4), rng.gen_range(1..=4)]).unwrap();
        let p = random_pattern(&mut rng, 2, 3, 4);
        let q = random_pattern(&mut rng, 2, 2, 3);
        let family = ForbiddenFamily::of_pattern(&p).unwrap().with_pattern(&q).unwrap();
        check_search(&shape, &family, &[Forbidden::Pattern(p), Forbidden::Pattern(q)], &[1, 2, 3]);
    }
    for _ in 0..20 {
        let shape = random_shape(&mut rng, 3, 2);
        let p = random_pattern(&mut rng, 3, 2, 3);
        check_search(&shape, &ForbiddenFamily::of_pattern(&p).unwrap(), &[Forbidden::Pattern(p)], &[1, 2]);
    }
}

#[test]
fn formation_searches_match_enumeration() {
    let mut rng = rng(17);
    for _ in 0..30 {
        let shape = Shape::new(vec![rng.gen_range(1..=5), rng.gen_range(1..=3)]).unwrap();
        let base = random_pattern(&mut rng, 1, 3, 2);
        let s = rng.gen_range(1..=3);
        let family = ForbiddenFamily::of_formation(&base, s).unwrap();
        let spec = FormationSpec::new(&base, s).unwrap();
        check_search(&shape, &family, &[Forbidden::Formation(spec)], &[1, 2, 3]);
    }
    for _ in 0..30 {
        let shape = Shape::new(vec![rng.gen_range(1..=4), rng.gen_range(1..=2), rng.gen_range(1..=2)]).unwrap();
        let base = random_pattern(&mut rng, 2, 2, 2);
        let s = rng.gen_range(1..=3);
        let family = ForbiddenFamily::of_formation(&base, s).unwrap();
        let spec = FormationSpec::new(&base, s).unwrap();
        check_search(&shape, &family, &[Forbidden::Formation(spec)], &[1, 2]);
    }
}

#[test]
fn doubled_searches_match_enumeration() {
    let mut rng = rng(18);
    for _ in 0..25 {
        let shape = Shape::new(vec![rng.gen_range(2..=6), rng.gen_range(1..=3)]).unwrap();
        let (r, s) = (rng.gen_range(1..=2), rng.gen_range(2..=3));
        let family = ForbiddenFamily::new().with_doubled(DoubledSpec::new(r, s).unwrap()).unwrap();
        check_search(&shape, &family, &[Forbidden::Doubled { r, s }], &[1, 2, 3]);
    }
}

#[test]
fn one_dimensional_lines() {
    // a line avoiding r ones in a row holds r-1 ones
    for r in 1..=5 {
        for n in 1..=8 {
            let fam = ForbiddenFamily::of_pattern(&Pattern::all_ones_line(r).unwrap()).unwrap();
            let shape = Shape::new(vec![n]).unwrap();
            let ex = ex_exact(&shape, &fam, &budget()).unwrap();
            assert_eq!(ex.value as usize, (r - 1).min(n));
            assert_eq!(ex.value as usize, ex_oracle(&shape, &[Forbidden::Pattern(Pattern::all_ones_line(r).unwrap())]));
        }
    }
}
