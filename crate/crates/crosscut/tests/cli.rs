//! Drives the installed binary end to end through temp files, the way a
//! shell session would.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use crosscut::extract::drawing_from_cut;
use crosscut::fmt::{write_document, Document};
use crosscut::harness::gen_instance;
use crosscut::reduce::{expand_drawing, reduce_chain, transfer_drawing, ReduceParams};
use crosscut::solver::mwc::mwc_exact;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crosscut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("crosscut-cli-{}-{name}", std::process::id()))
}

fn path_str(p: &PathBuf) -> &str {
    p.to_str().expect("temp paths are utf-8")
}

#[test]
fn generation_is_reproducible_end_to_end() {
    let a = run(&["gen", "5", "6", "--seed", "7"]);
    let b = run(&["gen", "5", "6", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout_of(&a);
    assert!(text.starts_with("graph 5 6\n"));
    assert!(text.contains("terminals "));
}

#[test]
fn deterministic_runs_need_no_seed() {
    let a = run(&["gen", "4", "--deterministic"]);
    let b = run(&["gen", "4", "--deterministic"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout_of(&a).contains("# seed"));
}

#[test]
fn the_framed_round_trip_recovers_the_cut_value() {
    let inst = tmp("inst.txt");
    let framed = tmp("framed.txt");
    let witness = tmp("witness.txt");

    let g = run(&["gen", "4", "4", "--seed", "3", "--out", path_str(&inst)]);
    assert!(g.status.success());
    let mwc = run(&["mwc", path_str(&inst)]);
    assert!(mwc.status.success());
    let want = stdout_of(&mwc);

    let r = run(&["reduce", path_str(&inst), "--stage", "H", "--out", path_str(&framed)]);
    assert!(r.status.success());
    let framed_text = fs::read_to_string(&framed).unwrap();
    assert!(framed_text.contains("map param frame-weight 1024"));

    // the certified ceiling for one cut of each weight keeps the capped
    // search tiny
    let s = run(&["cr-rot", path_str(&framed), "--cap", "3840", "--out", path_str(&witness)]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(stdout_of(&s).starts_with("value "));

    let x = run(&["extract", path_str(&inst), "--drawing", path_str(&witness), "--stage", "H"]);
    assert!(x.status.success(), "{}", String::from_utf8_lossy(&x.stderr));
    let got = stdout_of(&x);
    assert_eq!(got.lines().next(), want.lines().next());

    for p in [inst, framed, witness] {
        let _ = fs::remove_file(p);
    }
}

#[test]
fn the_cubic_stage_round_trips_through_files() {
    let inst_path = tmp("cubic-inst.txt");
    let drawing_path = tmp("cubic-drawing.txt");

    let inst = gen_instance(3, 3, 1).unwrap();
    let params = ReduceParams { frame_weight: 2, grid_height: 8 };
    let chain = reduce_chain(&inst, &params).unwrap();
    let best = mwc_exact(&inst).unwrap();
    let da = drawing_from_cut(&chain.anchored, &best.cut).unwrap();
    let de = expand_drawing(&da, &chain.expansion).unwrap();
    let dt = transfer_drawing(&de, &chain.cubic).unwrap();

    let idoc = Document::from_instance(inst.graph.clone(), inst.terminals);
    fs::write(&inst_path, write_document(&idoc).unwrap()).unwrap();
    fs::write(&drawing_path, write_document(&Document::from_drawing(&dt)).unwrap()).unwrap();

    let x = run(&[
        "extract",
        path_str(&inst_path),
        "--drawing",
        path_str(&drawing_path),
        "--stage",
        "Htilde",
        "--weight",
        "2",
        "--grid-height",
        "8",
    ]);
    assert!(x.status.success(), "{}", String::from_utf8_lossy(&x.stderr));
    let got = stdout_of(&x);
    assert!(got.starts_with(&format!("value {}\n", best.weight)), "{got}");

    for p in [inst_path, drawing_path] {
        let _ = fs::remove_file(p);
    }
}

#[test]
fn tiny_pipelines_cut_exactly() {
    let inst = tmp("pipe-inst.txt");
    let g = run(&["gen", "3", "3", "--seed", "1", "--out", path_str(&inst)]);
    assert!(g.status.success());
    let mwc = run(&["mwc", path_str(&inst)]);
    let p = run(&["pipeline", path_str(&inst), "--eps", "1/2"]);
    assert!(p.status.success(), "{}", String::from_utf8_lossy(&p.stderr));
    let text = stdout_of(&p);
    assert!(text.contains("cut exactly"));
    let value = |s: &str| s.lines().find(|l| l.starts_with("value ")).map(String::from);
    assert_eq!(value(&text), value(&stdout_of(&mwc)));
    let _ = fs::remove_file(inst);
}

#[test]
fn a_small_verification_run_exits_clean() {
    let v = run(&["verify", "--n-max", "3", "--trials", "1", "--seed", "1"]);
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    let text = stdout_of(&v);
    assert!(text.contains("summary trials=1 pass=1 skip=0 fail=0"), "{text}");
}

#[test]
fn witnesses_render_to_svg() {
    let graph = tmp("k4.txt");
    let witness = tmp("k4-witness.txt");
    let mut text = String::from("graph 4 6\nv a\nv b\nv c\nv d\n");
    for (u, v) in [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")] {
        text.push_str(&format!("e {u} {v} 1\n"));
    }
    fs::write(&graph, text).unwrap();
    let s = run(&["cr", path_str(&graph), "--out", path_str(&witness)]);
    assert!(s.status.success());
    assert!(stdout_of(&s).starts_with("value 0\n"));
    let r = run(&["render", path_str(&witness)]);
    assert!(r.status.success());
    assert!(stdout_of(&r).starts_with("<svg "));
    for p in [graph, witness] {
        let _ = fs::remove_file(p);
    }
}

#[test]
fn bad_inputs_exit_nonzero() {
    let inst = tmp("bad-inst.txt");
    let g = run(&["gen", "3", "3", "--seed", "2", "--out", path_str(&inst)]);
    assert!(g.status.success());

    // an instance file is not a drawing
    let x = run(&["extract", path_str(&inst), "--drawing", path_str(&inst), "--stage", "H"]);
    assert!(!x.status.success());

    let p = run(&["pipeline", path_str(&inst), "--oracle", "sideways"]);
    assert!(!p.status.success());

    let g2 = run(&["gen", "2", "5"]);
    assert!(!g2.status.success());

    let _ = fs::remove_file(inst);
}
