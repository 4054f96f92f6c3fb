use gazecut::energy::Labeling;
use gazecut::geometry::{cuboid_from_disparity_range, CuboidSpec, GazeWindow};
use gazecut::imaging::{
    encode_pgm, encode_pgm_ascii, ground_truth_to_depth, load_pgm, load_ppm, parse_pgm, parse_ppm,
    render_disparity, write_disparity_image, write_pgm, write_ppm, GrayImage, RgbImage,
};
use gazecut::Error;
use proptest::prelude::*;

#[test]
fn files_round_trip_with_comments() {
    let dir = tempfile::tempdir().unwrap();
    let rgb = RgbImage::new(2, 1, vec![255, 0, 0, 0, 255, 0]).unwrap();
    let p = dir.path().join("a.ppm");
    write_ppm(&rgb, &p, &["penalty=14".into(), "two\nlines".into()]).unwrap();
    let back = load_ppm(&p).unwrap();
    assert_eq!(back, rgb);
    assert_eq!((back.get(0, 0), back.get(1, 0)), ([255, 0, 0], [0, 255, 0]));
    let text = std::fs::read(&p).unwrap();
    assert!(text.starts_with(b"P6\n# penalty=14\n# two\n# lines\n2 1\n255\n"));

    let gray = GrayImage::new(3, 2, vec![0, 1, 2, 253, 254, 255]).unwrap();
    let q = dir.path().join("b.pgm");
    write_pgm(&gray, &q, &[]).unwrap();
    assert_eq!(load_pgm(&q).unwrap(), gray);
}

#[test]
fn ascii_and_binary_graymaps_agree() {
    let gray = GrayImage::new(3, 2, vec![9, 80, 7, 0, 255, 128]).unwrap();
    let a = parse_pgm(&encode_pgm_ascii(&gray)).unwrap();
    let b = parse_pgm(&encode_pgm(&gray, &[])).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, gray);
}

#[test]
fn ascii_pixmap_with_odd_whitespace() {
    let img = parse_ppm(b"P3 # a comment\n2 1 255\n1 2 3\t\n4 5  6\n").unwrap();
    assert_eq!(img.as_bytes(), &[1, 2, 3, 4, 5, 6]);
}

#[test]
fn malformed_inputs_are_rejected() {
    let cases: &[&[u8]] = &[
        b"",
        b"P9\n1 1\n255\n\0",
        b"P6\n1 1\n",
        b"P6\n1 1\n65535\n\0\0\0\0\0\0",
        b"P6\n1 1\n15\n\0\0\0",
        b"P6\n2 2\n255\n\0\0\0",
        b"P6\n0 1\n255\n",
        b"P5\n1 1\n255\n\0",
        b"P3\n1 1\n255\n1 2\n",
    ];
    for c in cases {
        assert!(matches!(parse_ppm(c), Err(Error::Format(_))), "{:?}", String::from_utf8_lossy(c));
    }
    assert!(matches!(parse_pgm(b"P2\n1 1\n9\n10\n"), Err(Error::Format(_))));
    assert!(matches!(parse_pgm(b"P6\n1 1\n255\n\0\0\0"), Err(Error::Format(_))));
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_ppm(dir.path().join("none.ppm")), Err(Error::Io { .. })));
}

#[test]
fn zero_pixels_carry_no_ground_truth() {
    let c = cuboid_from_disparity_range(40, 5, 4, 10, 2, GazeWindow::Centered).unwrap();
    let gt = ground_truth_to_depth(&GrayImage::new(40, 5, vec![0; 200]).unwrap(), 8, &c).unwrap();
    assert_eq!(gt.valid_sites(), 0);
    assert_eq!(gt.diagnostics.unknown_pixels, 200);
}

#[test]
fn rendering_round_trips_through_ground_truth() {
    for (w, scale) in [(64usize, 8u32), (65, 4), (101, 1)] {
        let c = cuboid_from_disparity_range(w as i64, 7, 3, 15, 2, GazeWindow::InImage).unwrap();
        let (g, y, m) = (c.g_extent as usize, c.y_extent as usize, c.d_extent as u32);
        let labels: Vec<u32> = (0..g * y).map(|i| ((i / 5 + i / g) as u32) % m).collect();
        let lab = Labeling::new(g, y, labels).unwrap();
        let img = render_disparity(&lab, &c, scale).unwrap();
        let gt = ground_truth_to_depth(&img, scale, &c).unwrap();
        // Every pixel that received a site maps back to one with the same label
        // (the nearest of those projecting there).
        let mut hits = 0;
        for h in 0..y {
            for ww in 0..g {
                if let Some(t) = gt.label(ww, h) {
                    assert_eq!(t, lab.get(ww, h), "w={w}");
                    hits += 1;
                }
            }
        }
        assert!(hits > 0);
    }
}

#[test]
fn uniform_labeling_renders_a_constant() {
    let c = CuboidSpec::new(30, 4, (-5, 11), (0, 4), (8, 4)).unwrap();
    let lab = Labeling::uniform(11, 4, 2);
    let img = render_disparity(&lab, &c, 5).unwrap();
    let values: std::collections::BTreeSet<u8> = img.as_bytes().iter().copied().collect();
    assert_eq!(values.len(), 2, "{values:?}");
    assert!(values.contains(&0));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.pgm");
    write_disparity_image(&lab, &c, 5, &p, &["x=1".into()]).unwrap();
    assert_eq!(load_pgm(&p).unwrap(), img);
    assert!(matches!(render_disparity(&lab, &c, 200), Err(Error::Config(_))));
}

proptest! {
    #[test]
    fn binary_round_trip(w in 1usize..9, h in 1usize..9, seed in any::<u64>()) {
        let pixels: Vec<u8> = (0..w * h * 3).map(|i| (seed.wrapping_mul(i as u64 + 7) >> 13) as u8).collect();
        let rgb = RgbImage::new(w, h, pixels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.ppm");
        write_ppm(&rgb, &p, &["k=v".into()]).unwrap();
        prop_assert_eq!(load_ppm(&p).unwrap(), rgb);
    }

    #[test]
    fn graymap_encodings_agree(w in 1usize..9, h in 1usize..9, v in prop::collection::vec(any::<u8>(), 64)) {
        let g = GrayImage::new(w, h, v[..w * h].to_vec()).unwrap();
        prop_assert_eq!(parse_pgm(&encode_pgm_ascii(&g)).unwrap(), g.clone());
        prop_assert_eq!(parse_pgm(&encode_pgm(&g, &[])).unwrap(), g);
    }
}
