//! Worked examples for each operation, with expected values computed by hand
//! or from first principles rather than by the code under test.

mod common;

use dimdecon::codec::{self, BinarizationScheme, PbmFormat};
use dimdecon::measures::{bdm, block_entropy, Measure, Scorer};
use dimdecon::partition::{
    self, balanced_triple, enumerate_3d, reshape, EnumerationMode, Mode3d, PartitionCandidate,
    SweepConfig, Variant,
};
use dimdecon::perturb::{self, derive_seed, mix64, FlipAmount, Perturbation};
use dimdecon::{BitString, Grid};

fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

fn grid(dims: &[usize], rows: &str) -> Grid {
    Grid::from_bitstring(dims.to_vec(), &bs(rows)).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn bdm_of_a_repeated_block_is_its_value_plus_log_multiplicity() {
    let table = common::committed_table();
    let k = |s: &str| table.entries()[&bs(s)];
    let g = grid(&[16], "0110011001100110");
    assert!(close(bdm(&g, &[4], &table).unwrap().value, k("0110") + 2.0));

    // 4×2 grid, 2×2 blocks: left block 1100 (rows "11", "00"), right block 0011
    let g = grid(&[4, 2], "11000011");
    let score = bdm(&g, &[2, 2], &table).unwrap();
    assert!(close(score.value, k("1100") + k("0011")));
    assert_eq!((score.scored_bits, score.dropped_bits), (8, 0));
    assert_eq!(score.fallback_fraction, Some(0.0));
}

#[test]
fn bdm_drops_partial_boundary_blocks() {
    let table = common::committed_table();
    // 5×3 with 2×2 blocks: two full blocks fit, 7 cells are left over
    let g = grid(&[5, 3], "110101101100000");
    let score = bdm(&g, &[2, 2], &table).unwrap();
    assert_eq!((score.scored_bits, score.dropped_bits), (8, 7));
    // blocks: rows y0..1 x0..1 = "11","11"; x2..3 = "01","01"
    let expect = table.entries()[&bs("1111")] + table.entries()[&bs("0101")];
    assert!(close(score.value, expect), "{}", score.value);
}

#[test]
fn eight_bit_blocks_use_the_fallback() {
    let table = common::committed_table();
    let score = bdm(&grid(&[16], "0000000011111111"), &[8], &table).unwrap();
    // 8-bit blocks are uncovered: each costs one more bit than its length
    assert!(close(score.value, 9.0 + 9.0));
    assert_eq!(score.fallback_fraction, Some(1.0));
}

#[test]
fn block_entropy_examples() {
    // equal numbers of 0 and 1: one bit per symbol
    assert!(close(block_entropy(&bs("0011"), 1).unwrap().value, 4.0));
    // a single repeated pair carries no information
    assert!(close(block_entropy(&bs("01010101"), 2).unwrap().value, 0.0));
    // blocks 01, 01, 10, 11: p = 1/2, 1/4, 1/4 → 1.5 bits × 4 blocks
    let s = block_entropy(&bs("010110111"), 2).unwrap();
    assert!(close(s.value, 6.0));
    assert_eq!((s.scored_bits, s.dropped_bits), (8, 1));
    let short = block_entropy(&bs("01"), 4).unwrap();
    assert_eq!(short.value, 0.0);
    assert!(short.warning.is_some());
}

#[test]
fn entropy_curve_of_a_zero_stream_is_binary_entropy() {
    // flipping exactly m of n zeros gives the same empirical distribution in
    // every trial, so the mean is n·H(m/n) and the spread is zero
    let n = 200;
    let x = BitString::zeros(n);
    let scorer = Scorer::new(Measure::BlockEntropy, None)
        .unwrap()
        .with_block_shape(vec![1]);
    let schedule = [0, 10, 50, 100];
    let curve = perturb::perturbation_curve(
        &x,
        &schedule,
        |m| Perturbation::FlipRandom(FlipAmount::Count(m)),
        &scorer,
        5,
        9,
    )
    .unwrap();
    for (step, &m) in curve.steps.iter().zip(&schedule) {
        let p = m as f64 / n as f64;
        let h = if m == 0 {
            0.0
        } else {
            -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
        };
        assert!(close(step.mean, n as f64 * h), "m={m}: {}", step.mean);
        assert_eq!(step.std, 0.0);
        assert_eq!(step.trials, 5);
    }
    assert_eq!(curve.base_score, 0.0);
}

#[test]
fn reshape_lays_rows_out_width_first() {
    let x = bs("1101001");
    let c = PartitionCandidate::new(vec![3, 2], x.len());
    assert_eq!((c.covered_bits, c.remainder_bits), (6, 1));
    let g = reshape(&x, &c).unwrap();
    let rows: Vec<String> = (0..2)
        .map(|y| {
            (0..3)
                .map(|x| if g.get(&[x, y]) { '1' } else { '0' })
                .collect()
        })
        .collect();
    assert_eq!(rows, ["110", "100"]);
}

#[test]
fn two_dimensional_reconstruction_variants() {
    let x = bs("110100");
    let variants = partition::reconstruct(&x, &PartitionCandidate::new(vec![3, 2], 6)).unwrap();
    let by_name: Vec<(String, Vec<usize>, String)> = variants
        .iter()
        .map(|(v, g)| {
            (
                v.to_string(),
                g.dims().to_vec(),
                g.to_bitstring().to_string(),
            )
        })
        .collect();
    // rows "110" / "100"
    assert_eq!(
        by_name,
        [
            ("original".to_string(), vec![3, 2], "110100".to_string()),
            (
                "mirror-vertical".to_string(),
                vec![3, 2],
                "100110".to_string()
            ),
            (
                "mirror-horizontal".to_string(),
                vec![3, 2],
                "011001".to_string()
            ),
            ("transpose".to_string(), vec![2, 3], "111000".to_string()),
        ]
    );
}

#[test]
fn three_dimensional_reconstruction_has_six_axis_orders() {
    let x: BitString = (0..24).map(|i| i % 5 == 0).collect();
    let variants = partition::reconstruct(&x, &PartitionCandidate::new(vec![2, 3, 4], 24)).unwrap();
    assert_eq!(variants.len(), 6);
    assert_eq!(variants[0].0, Variant::Original);
    assert_eq!(variants[0].1.to_bitstring(), x);
    let original = &variants[0].1;
    for (v, g) in &variants {
        let Variant::Permutation(p) = *v else {
            assert_eq!(*v, Variant::Original);
            continue;
        };
        for z in 0..g.dims()[2] {
            for y in 0..g.dims()[1] {
                for xx in 0..g.dims()[0] {
                    let out = [xx, y, z];
                    let mut src = [0; 3];
                    for i in 0..3 {
                        src[p[i]] = out[i];
                    }
                    assert_eq!(g.get(&out), original.get(&src), "{v}");
                }
            }
        }
    }
}

#[test]
fn degenerate_layouts_reconstruct_to_themselves() {
    let x = bs("10110");
    let variants = partition::reconstruct(&x, &PartitionCandidate::new(vec![5, 1], 5)).unwrap();
    assert_eq!(variants.len(), 1);
    assert_eq!(variants[0].0, Variant::Original);
}

#[test]
fn three_dimensional_enumeration() {
    // ordered factorizations of 12 into three factors
    let e = enumerate_3d(12, &Mode3d::Divisors, 1000).unwrap();
    let oracle = (1..=12)
        .flat_map(|a| (1..=12).map(move |b| (a, b)))
        .filter(|&(a, b)| 12 % (a * b) == 0)
        .count();
    assert_eq!(e.candidates.len(), oracle);
    assert_eq!(oracle, 18);
    assert!(e.warning.is_none());

    let capped = enumerate_3d(12, &Mode3d::Divisors, 5).unwrap();
    assert_eq!(capped.candidates.len(), 5);
    assert!(capped.warning.is_some());

    let full = enumerate_3d(
        100,
        &Mode3d::Full {
            leading: 1..=10,
            second: 4,
        },
        1000,
    )
    .unwrap();
    assert_eq!(full.candidates.len(), 10);
    assert_eq!(full.candidates[6].dims, vec![7, 4, 3]);
    assert_eq!(full.candidates[6].remainder_bits, 100 - 84);

    assert_eq!(balanced_triple(4096), [16, 16, 16]);
    assert_eq!(balanced_triple(60), [3, 4, 5]);
}

#[test]
fn spike_depth_is_distance_below_the_median_in_mads() {
    let values = [3.0, 4.0, 3.0, 4.0, 0.0, 4.0, 3.0, 4.0, 3.0];
    let depths = partition::spike_depths(&values, 5).unwrap();
    // window [3,4,0,4,3]: median 3, absolute deviations [0,1,3,1,0] → MAD 1
    assert!(close(depths[4], 3.0));
    // edge windows are shifted inward: index 0 uses the first five values,
    // median 3, deviations [0,1,0,1,3] → MAD 1
    assert!(close(depths[0], 0.0));
    assert!(close(depths[1], -1.0));
    assert!(partition::spike_depths(&values, 4).is_err());
    assert!(partition::spike_depths(&values[..3], 5).is_err());
}

#[test]
fn the_true_width_aligns_blocks() {
    // alternating full rows: at width 12 every 2×4 block is the same
    let mut g = Grid::zeros(vec![12, 40]).unwrap();
    for y in (0..40).step_by(2) {
        for x in 0..12 {
            g.set(&[x, y], true);
        }
    }
    let x = g.to_bitstring();
    let scorer = Scorer::new(Measure::BlockEntropy, None).unwrap();
    let series =
        partition::sweep(&x, &SweepConfig::new(2, EnumerationMode::Divisors), &scorer).unwrap();
    assert!(series
        .points
        .iter()
        .all(|p| p.candidate.remainder_bits == 0));
    assert_eq!(series.value_of(&[12, 40]), Some(0.0));
    assert!(series.value_of(&[8, 60]).unwrap() > 0.0);
    assert_eq!(series.minimum().unwrap().1, 0.0);
}

#[test]
fn flips_rates_and_seeds() {
    assert_eq!(perturb::flip_count_for_rate(1679, 0.165).unwrap(), 277);
    assert_eq!(perturb::flip_count_for_rate(10, 0.25).unwrap(), 3);
    assert!(perturb::flip_count_for_rate(10, 1.5).is_err());
    assert_eq!(derive_seed(42, 3), mix64(42 ^ 3));
    let x = BitString::zeros(64);
    let p = Perturbation::FlipRandom(FlipAmount::Rate(0.25));
    assert_eq!(p.apply(&x, 1).unwrap().count_ones(), 16);
    assert!(Perturbation::Amplify { factors: vec![2] }
        .apply(&x, 0)
        .is_err());
}

#[test]
fn amplification_example() {
    let g = grid(&[2, 2], "1001");
    let up = perturb::amplify(&g, &[2, 3]).unwrap();
    assert_eq!(up.dims(), &[4, 6]);
    assert_eq!(up.to_bitstring(), bs("110011001100001100110011"));
    assert!(perturb::amplify(&g, &[2]).is_err());
    assert!(perturb::amplify(&g, &[0, 1]).is_err());
}

#[test]
fn scrambling_moves_whole_segments() {
    let x = bs("0000111100110101");
    let y = perturb::scramble_segments(&x, 4, 5).unwrap();
    let mut segs: Vec<String> = y
        .to_string()
        .as_bytes()
        .chunks(4)
        .map(|c| String::from_utf8(c.to_vec()).unwrap())
        .collect();
    segs.sort();
    assert_eq!(segs, ["0000", "0011", "0101", "1111"]);
    // a trailing partial segment stays put
    let y = perturb::scramble_segments(&bs("00011011"), 3, 5).unwrap();
    assert!(y.to_string().ends_with("11"));
}

#[test]
fn text_binarization() {
    assert_eq!(
        codec::binarize_text("Hello world", BinarizationScheme::VowelMap).unwrap(),
        bs("01001001000")
    );
    assert_eq!(
        codec::binarize_text("a b", BinarizationScheme::SpaceMap).unwrap(),
        bs("010")
    );
    assert_eq!(
        codec::binarize_text("A", BinarizationScheme::Ascii8).unwrap(),
        bs("01000001")
    );
    assert!(codec::binarize_text("é", BinarizationScheme::Ascii8).is_err());
}

#[test]
fn pbm_examples() {
    let g = codec::parse_pbm(b"P1\n# comment\n3 2\n1 1 0\n1 0 0\n").unwrap();
    assert_eq!(g.dims(), &[3, 2]);
    assert_eq!(g.to_bitstring(), bs("110100"));
    // P4 rows are padded to whole bytes, most significant bit first
    assert_eq!(
        codec::encode_pbm(&g, PbmFormat::Raw).unwrap(),
        b"P4\n3 2\n\xC0\x80".to_vec()
    );
    assert!(codec::parse_pbm(b"P2\n1 1\n0\n").is_err());
    assert!(codec::parse_pbm(b"P1\n2 2\n1 0 1\n").is_err());
}

#[test]
fn bit_file_parsing_reports_offsets() {
    assert_eq!(codec::parse_bits(b"01 10\n11").unwrap(), bs("011011"));
    let err = codec::parse_bits(b"01x").unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
}

#[test]
fn schedules() {
    assert_eq!(perturb::parse_schedule("1:5:2").unwrap(), [1, 3, 5]);
    assert_eq!(perturb::parse_schedule("2:4").unwrap(), [2, 3, 4]);
    assert_eq!(
        perturb::parse_schedule("50,150,300").unwrap(),
        [50, 150, 300]
    );
    assert!(perturb::parse_schedule("5:1").is_err());
    assert!(perturb::parse_schedule("1:5:0").is_err());
}
