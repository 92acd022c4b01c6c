use std::fs::File;
use std::io::BufWriter;

use qmkdv::dynamics::{gauge_forward, EquationCoefficients};
use qmkdv::integrator::{evolve, EvolveConfig, Trajectory};
use qmkdv::io::{load_trajectory, read_field_file, save_trajectory, write_field_binary, write_field_csv};
use qmkdv::random::{random_field, seeded};
use qmkdv::{FrequencyGrid, SpectralField};

fn short_run() -> Trajectory {
    let grid = FrequencyGrid::new(16, 1.5).unwrap();
    let u0 = random_field(&mut seeded(3), grid, 5, 1.0, 0.2);
    let config = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, 1e-4).with_stride(4);
    evolve(&u0, 0.002, &config).unwrap()
}

fn assert_close(a: &Trajectory, b: &Trajectory) {
    assert_eq!(a.len(), b.len());
    assert_eq!(a.flow(), b.flow());
    assert_eq!(a.is_gauged(), b.is_gauged());
    for (x, y) in a.snapshots().iter().zip(b.snapshots()) {
        assert_eq!(x.time, y.time);
        assert_eq!(x.phase.is_some(), y.phase.is_some());
        assert!(x.field.max_abs_diff(&y.field) <= 1e-15 * x.field.max_abs());
    }
}

#[test]
fn trajectory_files_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let traj = gauge_forward(&short_run()).unwrap();
    for name in ["t.bin", "t.txt", "t.csv", "t.qmkt"] {
        let p = dir.path().join(name);
        save_trajectory(&p, &traj).unwrap();
        assert_close(&traj, &load_trajectory(&p).unwrap());
    }
    let p = dir.path().join("t.bin");
    assert_eq!(load_trajectory(&p).unwrap(), traj);
}

#[test]
fn field_files_are_sniffed() {
    let dir = tempfile::tempdir().unwrap();
    let grid = FrequencyGrid::unit(32).unwrap();
    let u = SpectralField::cosine(grid, 0.4, 3);

    let bin = dir.path().join("u.bin");
    write_field_binary(BufWriter::new(File::create(&bin).unwrap()), &u, 0.25).unwrap();
    let (v, t) = read_field_file(&bin).unwrap();
    assert_eq!((v, t), (u.clone(), 0.25));

    let csv = dir.path().join("u.csv");
    write_field_csv(&mut File::create(&csv).unwrap(), &u, 0.5, &["written by a test".to_string()]).unwrap();
    let (v, t) = read_field_file(&csv).unwrap();
    assert_eq!(t, 0.5);
    assert!(u.max_abs_diff(&v) <= 1e-15);
}

#[test]
fn missing_and_garbage_files_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_trajectory(&dir.path().join("absent.bin")).is_err());
    let junk = dir.path().join("junk.bin");
    std::fs::write(&junk, b"QMKT\x01\x00").unwrap();
    assert!(load_trajectory(&junk).is_err());
}
