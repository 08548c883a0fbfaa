use super::*;
use crate::bellcore::preparation_conditionals;
use crate::bellcore::SettingsMap;
use crate::rng::RandomStream;
use proptest::prelude::*;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn table_from_cells(cells: &[(u8, u8, u8, u8, u64)]) -> FreqTable16 {
    let mut table = FreqTable16::new();
    for &(a, b, x, y, n) in cells {
        for _ in 0..n {
            table.record(a, b, x, y);
        }
    }
    table
}

#[test]
fn single_run_table() {
    let table = table_from_cells(&[(0, 0, 0, 0, 1)]);
    assert_eq!(table.total(), 1);
    assert_eq!(table.count(0, 0, 0, 0), 1);
    assert_eq!(table.count(0, 0, 0, 1), 0);
}

#[test]
fn uniform_synthetic_table() {
    let mut cells = Vec::new();
    for code in 0..16u8 {
        cells.push((code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1, 1_000));
    }
    let table = table_from_cells(&cells);
    assert_eq!(table.total(), 16_000);
    for code in 0..16u8 {
        assert_eq!(
            table.count(code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1),
            1_000
        );
    }
    let outcome = chi_square_match(&table, &ProbTable16::uniform(), 0.001).unwrap();
    assert_eq!(outcome.statistic, 0.0);
    assert!(outcome.pass);
}

#[test]
fn correlator_trivials() {
    let perfect = table_from_cells(&[(0, 0, 0, 0, 500), (0, 0, 1, 1, 500)]);
    assert!((correlator(&perfect, 0, 0).unwrap().value - 1.0).abs() < 1e-12);
    let uniform = table_from_cells(&[
        (0, 0, 0, 0, 250),
        (0, 0, 0, 1, 250),
        (0, 0, 1, 0, 250),
        (0, 0, 1, 1, 250),
    ]);
    let e = correlator(&uniform, 0, 0).unwrap();
    assert_eq!(e.value, 0.0);
    assert!(matches!(
        correlator(&uniform, 1, 1),
        Err(crate::Error::EmptyStratum { a: 1, b: 1 })
    ));
}

#[test]
fn exact_correlators_match_closed_form() {
    // cos(2(ta - tb)) for the index-0 preparation, to 1e-12.
    let settings = SettingsMap::chsh_optimal();
    let [a0, a1, b0, b1] = settings.angles();
    let p = ProbTable16::from_conditionals(&preparation_conditionals(
        BellIndex::new(0).unwrap(),
        &settings,
    ));
    for (a, ta) in [(0usize, a0), (1, a1)] {
        for (b, tb) in [(0usize, b0), (1, b1)] {
            let got = correlator_exact(&p, a, b);
            let want = (2.0 * (ta - tb)).cos();
            assert!((got - want).abs() < 1e-12, "E({a},{b})");
        }
    }
    let s = chsh_exact(&p, sign_convention(BellIndex::new(0).unwrap()));
    assert!((s - 2.0 * SQRT2).abs() < 1e-12);
}

#[test]
fn sign_convention_table_is_the_exhaustive_argmax() {
    // Re-derive the fixed table: for each preparation, exactly one odd sign
    // pattern maximizes the exact CHSH value, reaching 2*sqrt(2).
    let settings = SettingsMap::chsh_optimal();
    for &m in &BellIndex::ALL {
        let p = ProbTable16::from_conditionals(&preparation_conditionals(m, &settings));
        let mut best = f64::NEG_INFINITY;
        let mut best_pattern = None;
        for pattern in SignConvention::all_odd() {
            let s = chsh_exact(&p, pattern);
            if s > best {
                best = s;
                best_pattern = Some(pattern);
            }
        }
        assert!((best - 2.0 * SQRT2).abs() < 1e-12, "m = {m}");
        assert_eq!(best_pattern.unwrap(), sign_convention(m), "m = {m}");
    }
}

#[test]
fn canonical_angles_attain_the_grid_maximum() {
    // Coarse grid re-derivation of the settings map: over all angle
    // quadruples on a pi/16 grid and all odd sign patterns, nothing beats
    // 2*sqrt(2), and the canonical angles reach it for every preparation.
    let step = std::f64::consts::PI / 16.0;
    let patterns = SignConvention::all_odd();
    let mut grid_max = f64::NEG_INFINITY;
    for ia0 in 0..16 {
        for ia1 in 0..16 {
            for ib0 in 0..16 {
                for ib1 in 0..16 {
                    let settings = SettingsMap::new(
                        [
                            crate::qcore::MeasurementSetting::new(ia0 as f64 * step).unwrap(),
                            crate::qcore::MeasurementSetting::new(ia1 as f64 * step).unwrap(),
                        ],
                        [
                            crate::qcore::MeasurementSetting::new(ib0 as f64 * step).unwrap(),
                            crate::qcore::MeasurementSetting::new(ib1 as f64 * step).unwrap(),
                        ],
                    );
                    let p = ProbTable16::from_conditionals(&preparation_conditionals(
                        BellIndex::new(0).unwrap(),
                        &settings,
                    ));
                    for pattern in &patterns {
                        grid_max = grid_max.max(chsh_exact(&p, *pattern));
                    }
                }
            }
        }
    }
    assert!(grid_max <= 2.0 * SQRT2 + 1e-9);
    let canonical = SettingsMap::chsh_optimal();
    for &m in &BellIndex::ALL {
        let p = ProbTable16::from_conditionals(&preparation_conditionals(m, &canonical));
        let s = chsh_exact(&p, sign_convention(m));
        assert!(s >= grid_max - 1e-9, "m = {m}: {s} < {grid_max}");
    }
}

#[test]
fn lhv_bound_is_two_for_all_odd_patterns() {
    for pattern in SignConvention::all_odd() {
        assert_eq!(lhv_max_chsh(pattern), 2.0);
    }
}

#[test]
fn chi_square_match_rejects_wrong_target() {
    // Sample from the index-0 law, test against the index-1 law.
    let settings = SettingsMap::chsh_optimal();
    let p0 = ProbTable16::from_conditionals(&preparation_conditionals(
        BellIndex::new(0).unwrap(),
        &settings,
    ));
    let p1 = ProbTable16::from_conditionals(&preparation_conditionals(
        BellIndex::new(1).unwrap(),
        &settings,
    ));
    let mut rng = RandomStream::from_seed(99).trial(0);
    let mut table = FreqTable16::new();
    let cells: Vec<f64> = (0..16)
        .map(|i| p0.cell(i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1))
        .collect();
    for _ in 0..200_000 {
        let cell = rng.choose_weighted(&cells);
        table.record(
            (cell >> 3 & 1) as u8,
            (cell >> 2 & 1) as u8,
            (cell >> 1 & 1) as u8,
            (cell & 1) as u8,
        );
    }
    assert!(chi_square_match(&table, &p0, 0.001).unwrap().pass);
    assert!(!chi_square_match(&table, &p1, 0.001).unwrap().pass);
}

#[test]
fn chi_square_match_calibration() {
    // Tables sampled from their own target should pass at alpha = 0.001 in
    // at least 95 of 100 seeded runs at N = 1e6.
    let settings = SettingsMap::chsh_optimal();
    let target = ProbTable16::from_conditionals(&preparation_conditionals(
        BellIndex::new(0).unwrap(),
        &settings,
    ));
    let cells: Vec<f64> = (0..16)
        .map(|i| target.cell(i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1))
        .collect();
    let mut cumulative = Vec::with_capacity(16);
    let mut acc = 0.0;
    for &c in &cells {
        acc += c;
        cumulative.push(acc);
    }
    let stream = RandomStream::from_seed(0xCA11B);
    let mut passes = 0;
    for seed in 0..100u64 {
        let sub = stream.substream(seed);
        let mut table = FreqTable16::new();
        let mut rng = sub.trial(0);
        for _ in 0..1_000_000 {
            let u = rng.next_f64();
            let cell = cumulative.partition_point(|&c| c <= u).min(15);
            table.record(
                (cell >> 3 & 1) as u8,
                (cell >> 2 & 1) as u8,
                (cell >> 1 & 1) as u8,
                (cell & 1) as u8,
            );
        }
        if chi_square_match(&table, &target, 0.001).unwrap().pass {
            passes += 1;
        }
    }
    assert!(passes >= 95, "only {passes}/100 calibration runs passed");
}

#[test]
fn chi_square_flags_impossible_cells() {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    // Target puts all stratum weight on (A,B) = (0,0).
    for a in 0..2 {
        for b in 0..2 {
            p[a][b][0][0] = 0.25;
        }
    }
    let target = ProbTable16::new(p).unwrap();
    let table = table_from_cells(&[(0, 0, 0, 0, 99), (0, 0, 1, 1, 1)]);
    let outcome = chi_square_match(&table, &target, 0.001).unwrap();
    assert!(!outcome.pass);
    assert!(outcome.statistic.is_infinite());
}

#[test]
fn homogeneity_detects_difference() {
    let left = table_from_cells(&[(0, 0, 0, 0, 900), (0, 0, 1, 1, 100)]);
    let right = table_from_cells(&[(0, 0, 0, 0, 500), (0, 0, 1, 1, 500)]);
    assert!(!chi_square_homogeneity(&left, &right, 0.001).unwrap().pass);
    let again = table_from_cells(&[(0, 0, 0, 0, 890), (0, 0, 1, 1, 110)]);
    assert!(chi_square_homogeneity(&left, &again, 0.001).unwrap().pass);
}

#[test]
fn independence_on_synthetic_columns() {
    // Perfectly coupled columns fail; a balanced grid passes.
    let coupled: Vec<Vec<usize>> = (0..1000).map(|i| vec![i % 2, i % 2]).collect();
    let data = crate::scm::Dataset::synthetic(&["x", "y"], &[2, 2], coupled);
    assert!(!independence_test(&data, "x", "y", None, 0.001).unwrap().pass);

    let balanced: Vec<Vec<usize>> = (0..1000).map(|i| vec![i % 2, (i / 2) % 2]).collect();
    let data = crate::scm::Dataset::synthetic(&["x", "y"], &[2, 2], balanced);
    assert!(independence_test(&data, "x", "y", None, 0.001).unwrap().pass);
    assert!(matches!(
        independence_test(&data, "x", "z", None, 0.001),
        Err(crate::Error::MissingColumn(_))
    ));
}

#[test]
fn no_signalling_deviation_on_synthetic_tables() {
    // Marginals flat across the remote setting: deviation 0.
    let flat = table_from_cells(&[
        (0, 0, 0, 0, 500),
        (0, 0, 1, 1, 500),
        (0, 1, 0, 0, 500),
        (0, 1, 1, 1, 500),
        (1, 0, 0, 0, 500),
        (1, 0, 1, 1, 500),
        (1, 1, 0, 0, 500),
        (1, 1, 1, 1, 500),
    ]);
    let (z, dev) = no_signalling_deviation(&flat);
    assert_eq!(dev, 0.0);
    assert_eq!(z, 0.0);

    // B copies a.
    let mut copying = FreqTable16::new();
    for a in 0..2u8 {
        for b in 0..2u8 {
            for _ in 0..500 {
                copying.record(a, b, 0, a);
            }
        }
    }
    let (z, dev) = no_signalling_deviation(&copying);
    assert!(dev > 0.9);
    assert!(z > 10.0);
}

#[test]
fn standard_errors_shrink_as_root_n() {
    for n_exp in 3..=6u32 {
        let n = 10u64.pow(n_exp);
        let per_cell = n / 16;
        let mut cells = Vec::new();
        for code in 0..16u8 {
            cells.push((
                code >> 3 & 1,
                code >> 2 & 1,
                code >> 1 & 1,
                code & 1,
                per_cell,
            ));
        }
        let table = table_from_cells(&cells);
        let e = correlator(&table, 0, 0).unwrap();
        let expected_se = (4.0 / n as f64).sqrt(); // 1/sqrt(n/4) at E = 0
        assert!(
            (e.se / expected_se - 1.0).abs() < 1e-9,
            "n = {n}: se {} vs {expected_se}",
            e.se
        );
        let s = chsh(&table, sign_convention(BellIndex::new(0).unwrap())).unwrap();
        assert!((s.se / (2.0 * expected_se) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn report_for_table_carries_all_fields() {
    let settings = SettingsMap::chsh_optimal();
    let target = ProbTable16::from_conditionals(&preparation_conditionals(
        BellIndex::new(0).unwrap(),
        &settings,
    ));
    let cells: Vec<f64> = (0..16)
        .map(|i| target.cell(i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1))
        .collect();
    let mut rng = RandomStream::from_seed(7).trial(0);
    let mut table = FreqTable16::new();
    for _ in 0..100_000 {
        let cell = rng.choose_weighted(&cells);
        table.record(
            (cell >> 3 & 1) as u8,
            (cell >> 2 & 1) as u8,
            (cell >> 1 & 1) as u8,
            (cell & 1) as u8,
        );
    }
    let report = StatReport::for_table(&table, sign_convention(BellIndex::new(0).unwrap()))
        .unwrap();
    let s = report.chsh.unwrap();
    assert!((s.value - 2.0 * SQRT2).abs() < 10.0 * s.se);
    assert!(report.no_signalling_max_dev.unwrap() < 4.0);
    for row in report.correlators.unwrap() {
        for e in row {
            assert!(e.value.abs() <= 1.0);
        }
    }
}

proptest! {
    #[test]
    fn merge_equals_concatenation(
        runs_a in prop::collection::vec((0u8..2, 0u8..2, 0u8..2, 0u8..2), 1..200),
        runs_b in prop::collection::vec((0u8..2, 0u8..2, 0u8..2, 0u8..2), 1..200),
    ) {
        let mut ta = FreqTable16::new();
        for &(a, b, x, y) in &runs_a {
            ta.record(a, b, x, y);
        }
        let mut tb = FreqTable16::new();
        for &(a, b, x, y) in &runs_b {
            tb.record(a, b, x, y);
        }
        let mut concat = FreqTable16::new();
        for &(a, b, x, y) in runs_a.iter().chain(&runs_b) {
            concat.record(a, b, x, y);
        }
        prop_assert_eq!(ta.merge(&tb), concat);
    }

    #[test]
    fn tabulation_is_permutation_invariant(
        mut runs in prop::collection::vec((0u8..2, 0u8..2, 0u8..2, 0u8..2), 1..200),
        by in 0usize..200,
    ) {
        let mut ordered = FreqTable16::new();
        for &(a, b, x, y) in &runs {
            ordered.record(a, b, x, y);
        }
        let k = by % runs.len();
        runs.rotate_left(k);
        let mut rotated = FreqTable16::new();
        for &(a, b, x, y) in &runs {
            rotated.record(a, b, x, y);
        }
        prop_assert_eq!(ordered, rotated);
    }
}
