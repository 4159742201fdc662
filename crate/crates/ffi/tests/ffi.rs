use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qcap_ffi::*;

fn last_error() -> String {
    let p = qcap_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn channel_lifecycle_and_capacity() {
    let preset = CString::new("depolarizing:2,0.6666666666666666").unwrap();
    let mut ch = ptr::null_mut();
    unsafe {
        assert_eq!(qcap_channel_from_preset(preset.as_ptr(), &mut ch), QcapStatus::Ok);
        assert!(qcap_last_error().is_null());
        let (mut di, mut dout) = (0, 0);
        assert_eq!(qcap_channel_dims(ch, &mut di, &mut dout), QcapStatus::Ok);
        assert_eq!((di, dout), (2, 2));
        let mut r = QcapCeResult::default();
        assert_eq!(qcap_ce_maximize(ch, 1e-8, &mut r), QcapStatus::Ok);
        assert!((r.value - 0.2075).abs() < 5e-4);
        assert!(r.gap_bound <= 1e-8);
        qcap_channel_free(ch);
        qcap_channel_free(ptr::null_mut());
    }
}

#[test]
fn json_channel() {
    let spec = CString::new(r#"{"kind": "erasure", "params": {"p": 0.5}}"#).unwrap();
    let mut ch = ptr::null_mut();
    unsafe {
        assert_eq!(qcap_channel_from_json(spec.as_ptr(), &mut ch), QcapStatus::Ok);
        let mut r = QcapCeResult::default();
        assert_eq!(qcap_ce_maximize(ch, 1e-8, &mut r), QcapStatus::Ok);
        assert!((r.value - 1.0).abs() < 1e-6);
        qcap_channel_free(ch);

        let bad = CString::new("{not json").unwrap();
        assert_eq!(qcap_channel_from_json(bad.as_ptr(), &mut ch), QcapStatus::Parse);
        assert!(ch.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn error_codes() {
    let mut ch = ptr::null_mut();
    unsafe {
        assert_eq!(qcap_channel_from_preset(ptr::null(), &mut ch), QcapStatus::NullPointer);
        assert!(last_error().contains("preset"));
        let bad = CString::new("amplitude-damping:1.5").unwrap();
        assert_eq!(qcap_channel_from_preset(bad.as_ptr(), &mut ch), QcapStatus::InvalidArgument);
        let unknown = CString::new("teleporter").unwrap();
        assert_eq!(qcap_channel_from_preset(unknown.as_ptr(), &mut ch), QcapStatus::Parse);
        let mut r = QcapCeResult::default();
        assert_eq!(qcap_ce_maximize(ptr::null(), 1e-7, &mut r), QcapStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(qcap_gaussian_ce(-1.0, 1.0, 1.0, &mut v), QcapStatus::InvalidArgument);
        assert_eq!(qcap_ce_over_cshan_limit(0.0, &mut v), QcapStatus::InvalidArgument);
        assert_eq!(qcap_gaussian_ce(1.0, 1.0, 1.0, ptr::null_mut()), QcapStatus::NullPointer);
    }
}

#[test]
fn gaussian_values() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(qcap_ce_over_cshan_limit(1.0, &mut v), QcapStatus::Ok);
        assert!((v - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        // Noiseless bosonic channel: twice the thermal entropy, g(1) = 2 bits.
        assert_eq!(qcap_gaussian_ce(1.0, 0.0, 1.0, &mut v), QcapStatus::Ok);
        assert!((v - 4.0).abs() < 1e-12);
    }
}

#[test]
fn dmc_and_simulation() {
    let table = [0.9, 0.1, 0.1, 0.9];
    let mut dmc = ptr::null_mut();
    unsafe {
        assert_eq!(qcap_dmc_new(table.as_ptr(), 2, 2, &mut dmc), QcapStatus::Ok);
        let (mut c, mut q) = (0.0, [0.0; 2]);
        assert_eq!(qcap_dmc_capacity(dmc, 1e-12, &mut c, q.as_mut_ptr()), QcapStatus::Ok);
        let h = -(0.1f64 * 0.1f64.log2() + 0.9 * 0.9f64.log2());
        assert!((c - (1.0 - h)).abs() < 1e-9);
        assert!((q[0] - 0.5).abs() < 1e-9);
        let mut dev = 1.0;
        assert_eq!(qcap_rst_verify_exact(dmc, 0.0, 2, 3, &mut dev), QcapStatus::Ok);
        assert!(dev <= 1e-12);
        qcap_dmc_free(dmc);

        assert_eq!(qcap_rst_verify_exact(ptr::null(), 0.3, 2, 4, &mut dev), QcapStatus::Ok);
        assert!(dev <= 1e-12);
        assert_eq!(qcap_rst_verify_exact(ptr::null(), 0.3, 6, 8, &mut dev), QcapStatus::LimitExceeded);

        let bad = [0.5, 0.4];
        assert_eq!(qcap_dmc_new(bad.as_ptr(), 1, 2, &mut dmc), QcapStatus::InvalidArgument);
        assert!(dmc.is_null());
        assert_eq!(qcap_dmc_new(ptr::null(), 1, 2, &mut dmc), QcapStatus::NullPointer);
    }
}

#[test]
fn typical_flags() {
    let probs = [0.7, 0.3];
    let mut ok = [9u8; 3];
    let mut mass = 0.0;
    unsafe {
        assert_eq!(qcap_typical_check(probs.as_ptr(), 2, 20, 0.1, 0.1, ok.as_mut_ptr(), &mut mass), QcapStatus::Ok);
    }
    assert_eq!(ok, [0, 1, 1]);
    assert!((mass - 0.534764).abs() < 1e-6);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qcap_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("qcap.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).expect("build script writes the header");
    for name in [
        "qcap_last_error",
        "qcap_version",
        "qcap_channel_from_preset",
        "qcap_channel_from_json",
        "qcap_channel_free",
        "qcap_channel_dims",
        "qcap_ce_maximize",
        "qcap_gaussian_ce",
        "qcap_ce_over_cshan_limit",
        "qcap_dmc_new",
        "qcap_dmc_free",
        "qcap_dmc_capacity",
        "qcap_rst_verify_exact",
        "qcap_typical_check",
        "typedef struct QcapChannel QcapChannel;",
        "QCAP_STATUS_NULL_POINTER = 1",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Compiles and runs a small C program against the header and the static
/// library when a C compiler is on the PATH.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libqcap_ffi.a");
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("ffi_smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "qcap.h"
int main(void) {
    QcapChannel *ch = NULL;
    if (qcap_channel_from_preset("noiseless:2", &ch) != QCAP_STATUS_OK) return 1;
    QcapCeResult r;
    if (qcap_ce_maximize(ch, 1e-8, &r) != QCAP_STATUS_OK) return 2;
    qcap_channel_free(ch);
    if (qcap_channel_from_preset("nonsense", &ch) != QCAP_STATUS_PARSE) return 3;
    if (qcap_last_error() == NULL) return 4;
    printf("%.6f\n", r.value);
    return 0;
}
"#,
    )
    .unwrap();
    // Only the header is checked when the archive is not part of this build.
    let bin = tmp.join("ffi_smoke");
    let mut cmd = Command::new("cc");
    cmd.arg(&src).arg("-I").arg(header().parent().unwrap());
    if lib.exists() {
        cmd.arg(&lib).args(["-lpthread", "-ldl", "-lm", "-o"]).arg(&bin);
    } else {
        cmd.arg("-fsyntax-only");
    }
    let status = cmd.status().unwrap();
    assert!(status.success(), "C compilation failed");
    if lib.exists() {
        let out = Command::new(&bin).output().unwrap();
        assert!(out.status.success(), "C program exited with {:?}", out.status);
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2.000000");
    }
}
