//! The metric's required behavioral properties on constructed fixtures.

use pvjpeg::image::RgbImage;
use pvjpeg::metric::{
    compute_masks, distance_map, distance_map_with_masks, global_distance, opponent_transform,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perturb(img: &RgbImage, deltas: &[(u32, u32, [i16; 3])]) -> RgbImage {
    let mut out = img.clone();
    for &(x, y, d) in deltas {
        let p = img.pixel(x, y);
        out.set_pixel(
            x,
            y,
            [
                (p[0] as i16 + d[0]).clamp(0, 255) as u8,
                (p[1] as i16 + d[1]).clamp(0, 255) as u8,
                (p[2] as i16 + d[2]).clamp(0, 255) as u8,
            ],
        );
    }
    out
}

#[test]
fn zero_self_distance() {
    for seed in 0..3u64 {
        let img = pvjpeg::synth::synthetic_photo(40, 24, seed);
        let map = distance_map(&img, &img).unwrap();
        assert_eq!(global_distance(&map), 0.0);
        assert!(map.values().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn sign_symmetry_of_perturbations() {
    // Headroom keeps +delta and -delta both unclamped.
    let ref_img = pvjpeg::synth::synthetic_photo(32, 32, 7);
    let mut mid = ref_img.clone();
    for y in 0..32 {
        for x in 0..32 {
            let p = mid.pixel(x, y);
            mid.set_pixel(x, y, [p[0].clamp(32, 223), p[1].clamp(32, 223), p[2].clamp(32, 223)]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let deltas: Vec<(u32, u32, [i16; 3])> = (0..64)
        .map(|_| {
            (
                rng.gen_range(0..32),
                rng.gen_range(0..32),
                [
                    rng.gen_range(-16..=16),
                    rng.gen_range(-16..=16),
                    rng.gen_range(-16..=16),
                ],
            )
        })
        .collect();
    let plus = perturb(&mid, &deltas);
    let negated: Vec<_> = deltas
        .iter()
        .map(|&(x, y, d)| (x, y, [-d[0], -d[1], -d[2]]))
        .collect();
    let minus = perturb(&mid, &negated);

    let d_plus = distance_map(&mid, &plus).unwrap();
    let d_minus = distance_map(&mid, &minus).unwrap();
    assert_eq!(d_plus.values(), d_minus.values());
}

#[test]
fn blue_perturbation_is_more_visible_on_black_than_yellow() {
    let distance_on = |bg: [u8; 3]| {
        let base = RgbImage::filled(16, 16, bg);
        let deltas: Vec<_> = (4..12)
            .flat_map(|y| (4..12).map(move |x| (x, y, [0i16, 0, 8])))
            .collect();
        let candidate = perturb(&base, &deltas);
        global_distance(&distance_map(&base, &candidate).unwrap())
    };
    let on_black = distance_on([0, 0, 0]);
    let on_yellow = distance_on([255, 255, 0]);
    assert!(
        on_black > on_yellow,
        "blue change on black {on_black} must exceed on yellow {on_yellow}"
    );
}

#[test]
fn activity_masks_identical_perturbations() {
    // Left half flat gray, right half checkerboard; the same noise patch
    // lands in one block of each half.
    let mut base = RgbImage::filled(32, 16, [128, 128, 128]);
    for y in 0..16 {
        for x in 16..32 {
            let v = if (x + y) % 2 == 0 { 88 } else { 168 };
            base.set_pixel(x, y, [v, v, v]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let patch: Vec<[i16; 3]> = (0..64)
        .map(|_| {
            let d = rng.gen_range(-6..=6i16);
            [d, d, d]
        })
        .collect();
    let mut deltas = Vec::new();
    for dy in 0..8u32 {
        for dx in 0..8u32 {
            let d = patch[(dy * 8 + dx) as usize];
            deltas.push((dx, dy + 8, d)); // flat block (0,1)
            deltas.push((16 + dx, dy + 8, d)); // textured block (2,1)
        }
    }
    let candidate = perturb(&base, &deltas);
    let map = distance_map(&base, &candidate).unwrap();
    let flat_err = map.get(0, 1);
    let busy_err = map.get(2, 1);
    assert!(
        flat_err > busy_err,
        "flat block error {flat_err} must exceed textured block error {busy_err}"
    );
}

#[test]
fn high_frequency_blue_is_attenuated_against_green() {
    let base = RgbImage::filled(16, 16, [128, 128, 128]);
    let checker = |channel: usize| {
        let deltas: Vec<_> = (0..16u32)
            .flat_map(|y| {
                (0..16u32).map(move |x| {
                    let sign = if (x + y) % 2 == 0 { 10i16 } else { -10 };
                    let mut d = [0i16; 3];
                    d[channel] = sign;
                    (x, y, d)
                })
            })
            .collect();
        global_distance(&distance_map(&base, &perturb(&base, &deltas)).unwrap())
    };
    let blue = checker(2);
    let green = checker(1);
    assert!(
        blue < green,
        "high-frequency blue {blue} must be less visible than green {green}"
    );
}

#[test]
fn distance_is_monotone_in_amplitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..10 {
        let base = pvjpeg::synth::synthetic_photo(24, 24, 1000 + trial);
        // Clamp the base toward mid-range so 3x the pattern stays in gamut.
        let mut mid = base.clone();
        for y in 0..24 {
            for x in 0..24 {
                let p = mid.pixel(x, y);
                mid.set_pixel(x, y, [p[0].clamp(24, 231), p[1].clamp(24, 231), p[2].clamp(24, 231)]);
            }
        }
        let pattern: Vec<(u32, u32, [i16; 3])> = (0..40)
            .map(|_| {
                (
                    rng.gen_range(0..24),
                    rng.gen_range(0..24),
                    [
                        rng.gen_range(-8..=8),
                        rng.gen_range(-8..=8),
                        rng.gen_range(-8..=8),
                    ],
                )
            })
            .collect();
        let mut last = 0.0f64;
        for k in 1..=3i16 {
            let scaled: Vec<_> = pattern
                .iter()
                .map(|&(x, y, d)| (x, y, [d[0] * k, d[1] * k, d[2] * k]))
                .collect();
            let d = global_distance(&distance_map(&mid, &perturb(&mid, &scaled)).unwrap());
            assert!(
                d >= last,
                "trial {trial}: distance fell from {last} to {d} at amplitude {k}"
            );
            last = d;
        }
    }
}

#[test]
fn masks_come_from_the_reference_only() {
    let reference = pvjpeg::synth::synthetic_photo(32, 32, 12);
    let masks = compute_masks(&opponent_transform(&reference));

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..2 {
        let deltas: Vec<(u32, u32, [i16; 3])> = (0..100)
            .map(|_| {
                (
                    rng.gen_range(0..32),
                    rng.gen_range(0..32),
                    [
                        rng.gen_range(-20..=20),
                        rng.gen_range(-20..=20),
                        rng.gen_range(-20..=20),
                    ],
                )
            })
            .collect();
        let candidate = perturb(&reference, &deltas);
        let direct = distance_map(&reference, &candidate).unwrap();
        let via_masks = distance_map_with_masks(&reference, &candidate, &masks).unwrap();
        assert_eq!(direct.values(), via_masks.values());
    }
}
