use gazecut::geometry::{
    cross_from_pixels, cuboid_from_disparity_range, depth_count, disparity_from_whs, halve_away,
    pixels_from_gaze_depth, whs_from_disparity, CuboidSpec, GazeDepth, GazeWindow, Whs,
};
use proptest::prelude::*;

#[test]
fn pixel_pairs_round_trip_exhaustively() {
    for w in 1..=64i64 {
        let mut crosses = 0;
        for x_l in 0..w {
            for x_r in 0..w {
                let Some(gd) = cross_from_pixels(x_l, x_r, 5, w) else {
                    continue;
                };
                crosses += 1;
                // The defining relations, checked directly.
                assert_eq!(x_r + x_l, w - 1 + 2 * gd.g);
                assert_eq!(x_r - x_l, -(w - 1) + 2 * gd.d);
                assert!(gd.d >= 0 && 2 * gd.d < w);
                assert!(2 * gd.g > -w && 2 * gd.g < w);
                let back = pixels_from_gaze_depth(gd, w).unwrap();
                assert_eq!((back.x_l, back.x_r, back.y), (x_l, x_r, 5));
            }
        }
        // Pairs with x_r <= x_l and matching parity: one per (d, g) in range.
        let expected: i64 = (0..w)
            .flat_map(|x_l| (0..=x_l).map(move |x_r| (x_l, x_r)))
            .filter(|(l, r)| (l + r - (w - 1)) % 2 == 0)
            .count() as i64;
        assert_eq!(crosses, expected, "w={w}");
    }
}

#[test]
fn gaze_depth_round_trip_exhaustively() {
    for w in 1..=64i64 {
        for g in -w..=w {
            for d in -1..=w {
                let gd = GazeDepth { g, d, y: 0 };
                if let Ok(p) = pixels_from_gaze_depth(gd, w) {
                    assert_eq!(cross_from_pixels(p.x_l, p.x_r, 0, w), Some(gd));
                }
            }
        }
    }
}

#[test]
fn disparity_round_trip_exhaustively() {
    for w in 1..=64i64 {
        let valid = depth_count(w);
        let c = CuboidSpec::new(w, 2, (-(valid - 1), 2 * valid - 1), (0, 2), (0, valid)).unwrap();
        for ws in 0..c.g_extent {
            for h in 0..2 {
                for s in 0..c.d_extent {
                    let whs = Whs { w: ws, h, s };
                    if let Ok(p) = disparity_from_whs(whs, &c) {
                        assert!((0..w).contains(&p.x) && (0..w).contains(&(p.x + p.dis)));
                        assert_eq!(whs_from_disparity(p.x, p.y, p.dis, &c), whs, "w={w}");
                    }
                }
            }
        }
    }
}

#[test]
fn disparities_two_apart_are_one_depth_apart() {
    let c = cuboid_from_disparity_range(384, 288, 10, 28, 7, GazeWindow::Centered).unwrap();
    for dis in 0..60 {
        let a = whs_from_disparity(100, 3, dis, &c);
        let b = whs_from_disparity(100, 3, dis + 2, &c);
        assert_eq!(a.s - b.s, 1);
    }
}

#[test]
fn tsukuba_window() {
    let c = cuboid_from_disparity_range(384, 288, 10, 28, 7, GazeWindow::Centered).unwrap();
    assert_eq!((c.g_extent, c.y_extent, c.d_extent), (372, 288, 24));
    let inside = cuboid_from_disparity_range(384, 288, 10, 28, 7, GazeWindow::InImage).unwrap();
    assert!(inside.fully_in_image());
    assert_eq!((inside.g_extent, inside.d_extent), (337, 24));
}

proptest! {
    #[test]
    fn halving(n in -1_000_000i64..1_000_000) {
        let h = halve_away(n);
        prop_assert_eq!(halve_away(-n), -h);
        prop_assert!((2 * h - n).abs() <= 1);
        prop_assert!((2 * h).abs() >= n.abs());
    }

    #[test]
    fn cuboid_axes_invert(
        w in 2i64..500,
        g0 in -50i64..50,
        d0 in 0i64..50,
        ws in 0i64..40,
        h in 0i64..40,
        s in 0i64..40,
    ) {
        let Ok(c) = CuboidSpec::new(w, 50, (g0, 41), (3, 41), (d0, 41)) else {
            return Ok(());
        };
        let whs = Whs { w: ws, h, s };
        let gd = c.gaze_depth_from_whs(whs);
        prop_assert_eq!(c.whs_from_gaze_depth(gd), whs);
        prop_assert!(c.contains(whs));
        let (x_l, x_r, y) = c.pixel_columns(ws, h, s);
        prop_assert_eq!(y, h + 3);
        prop_assert_eq!(x_l + x_r, w - 1 + 2 * gd.g);
        prop_assert_eq!(x_r - x_l, -(w - 1) + 2 * gd.d);
    }

    #[test]
    fn right_pixel_and_disparity_recover_the_site(
        w in 30i64..400,
        x in 0i64..400,
        dis in 0i64..30,
    ) {
        prop_assume!(x + dis < w);
        let c = cuboid_from_disparity_range(w, 4, 0, (w - 1).min(29), 0, GazeWindow::Centered).unwrap();
        let whs = whs_from_disparity(x, 1, dis, &c);
        if let Ok(p) = disparity_from_whs(whs, &c) {
            // Only disparities with the parity of w - 1 hit a cross point exactly;
            // the rest land on the neighbouring one.
            prop_assert!((p.dis - dis).abs() <= 1);
            prop_assert!((p.x - x).abs() <= 1);
            if (dis - (w - 1)).rem_euclid(2) == 0 {
                prop_assert_eq!((p.x, p.dis), (x, dis));
            }
        }
    }
}
