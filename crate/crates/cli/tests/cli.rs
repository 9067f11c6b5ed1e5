use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use tplcnn::pgm::{image_to_phase_map, phase_map_image, GrayImage};
use tplcnn::run::frame_name;
use tplcnn_core::Grid;

fn tplcnn(args: &[&str], scenario: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tplcnn"))
        .args(args)
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout_value(out: &Output, key: &str) -> Option<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

proptest! {
    #[test]
    fn pgm_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
        let img = GrayImage::new(Grid::from_fn(h, w, |r, c| {
            (seed.rotate_left((r * w + c) as u32 % 64) & 0xff) as u8
        }));
        let back = GrayImage::decode(&img.encode()).unwrap();
        prop_assert_eq!(back, img);
    }

    #[test]
    fn phase_map_frames_round_trip(bits in prop::collection::vec(any::<bool>(), 1..200)) {
        let n = bits.len();
        let map = Grid::from_vec(1, n, bits).unwrap();
        prop_assert_eq!(image_to_phase_map(&phase_map_image(&map)), map);
    }
}

#[test]
fn pgm_header_comments_are_skipped() {
    let bytes = b"P5\n# made by hand\n2 1\n255\n\x00\xff";
    let img = GrayImage::decode(bytes).unwrap();
    assert_eq!(img.pixels.as_slice(), &[0, 255]);
    assert!(GrayImage::decode(b"P2\n1 1\n255\n0").is_err());
    assert!(GrayImage::decode(b"P5\n2 2\n255\n\x00").is_err());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "schema = 1\nkind = \"network-run\"\nflavour = 1\n[network]\nrows = 2\ncols = 2\n\
         coupling = 0.1\npump_amplitude = 0.1\npump_period = 1.0\ncycles = 2\n\
         [bias]\nsource = \"uniform\"\nlevel = 0.5\n",
    )
    .unwrap();
    let out = tplcnn(&["network-run"], &path, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error kind=config code=1"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn wrong_subcommand_and_bad_values_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let body = "schema = 1\nkind = \"network-run\"\n[network]\nrows = 2\ncols = 2\n\
                coupling = 0.1\npump_amplitude = 0.1\npump_period = PERIOD\ncycles = 2\n\
                [bias]\nsource = \"uniform\"\nlevel = 0.5\n";
    fs::write(&path, body.replace("PERIOD", "1.0")).unwrap();
    let out = tplcnn(&["cnn-run"], &path, &dir.path().join("o1"));
    assert_eq!(out.status.code(), Some(1));

    fs::write(&path, body.replace("PERIOD", "-1.0")).unwrap();
    let out = tplcnn(&["network-run"], &path, &dir.path().join("o2"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid parameter"));

    fs::write(&path, body.replace("schema = 1", "schema = 9").replace("PERIOD", "1.0")).unwrap();
    let out = tplcnn(&["network-run"], &path, &dir.path().join("o3"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_file_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = tplcnn(&["network-run"], &dir.path().join("nope.toml"), &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error kind=io code=2"));
}

#[test]
fn subthreshold_element_is_unlocked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    fs::write(
        &path,
        "schema = 1\nkind = \"element-sweep\"\n[element]\nv_dc = 0.1\nv_ac = 0.1\n\
         pump_period = { start = 1.0, stop = 2.0, count = 3 }\nwindow_cycles = 200\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = tplcnn(&["element-sweep"], &path, &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_value(&out, "locked").as_deref(), Some("0"));
    let csv = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(3) == Some("unlocked")), "{csv}");
}

#[test]
fn analyze_reports_period_of_saved_frames() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    fs::create_dir(&frames).unwrap();
    for k in 0..40 {
        let map = Grid::from_fn(5, 6, |r, c| (r * 6 + c) % 7 == k % 7);
        phase_map_image(&map).write(&frames.join(frame_name(k))).unwrap();
    }
    let path = dir.path().join("an.toml");
    fs::write(
        &path,
        "schema = 1\nkind = \"analyze\"\n[frames]\ndir = \"frames\"\n[analysis]\ntransient_skip = 3\n",
    )
    .unwrap();
    let out = tplcnn(&["analyze"], &path, &dir.path().join("out"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_value(&out, "period").as_deref(), Some("7"));
    assert_eq!(stdout_value(&out, "distinct_maps").as_deref(), Some("7"));
}

#[test]
fn network_run_writes_frames_and_events() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.toml");
    fs::write(
        &path,
        "schema = 1\nkind = \"network-run\"\n[network]\nrows = 3\ncols = 4\ncoupling = 0.2\n\
         pump_amplitude = 0.3\npump_period = 1.55\ncycles = 5\nsteps_per_cycle = 32\n\
         [bias]\nsource = \"uniform\"\nlevel = 0.5\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = tplcnn(&["network-run"], &path, &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..5 {
        let img = GrayImage::read(&out_dir.join(frame_name(k))).unwrap();
        assert_eq!((img.height(), img.width()), (3, 4));
    }
    let events = fs::read_to_string(out_dir.join("events.csv")).unwrap();
    assert_eq!(events.lines().next(), Some("cycle,time,row,col"));
    let n: usize = stdout_value(&out, "events").unwrap().parse().unwrap();
    assert_eq!(events.lines().count(), n + 1);
}
