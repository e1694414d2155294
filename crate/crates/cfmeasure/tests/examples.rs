//! Every example runs to completion.

mod hello_library_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/hello_library.rs"));
}

mod approx_profile_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/approx_profile.rs"));
}

mod exactness_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exactness.rs"));
}

mod schedule_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/schedule.rs"));
}

mod block_measures_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/block_measures.rs"));
}

mod measure_tree_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/measure_tree.rs"));
}

mod sampling_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sampling.rs"));
}

mod scales_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scales.rs"));
}

mod ball_conditions_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ball_conditions.rs"));
}

mod dim_bad_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dim_bad.rs"));
}

mod van_der_corput_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/van_der_corput.rs"));
}

mod f_xi_m2_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/f_xi_m2.rs"));
}

mod qr_lemma_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/qr_lemma.rs"));
}

mod approx_error_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/approx_error.rs"));
}

mod fourier_decay_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fourier_decay.rs"));
}

mod normality_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/normality.rs"));
}

mod run_pipeline_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/run_pipeline.rs"));
}

mod calibrate_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/calibrate.rs"));
}

#[test]
fn hello_library_example_runs() {
    hello_library_example::run_example().expect("hello_library example should run");
}

#[test]
fn approx_profile_example_runs() {
    approx_profile_example::run_example().expect("approx_profile example should run");
}

#[test]
fn exactness_example_runs() {
    exactness_example::run_example().expect("exactness example should run");
}

#[test]
fn schedule_example_runs() {
    schedule_example::run_example().expect("schedule example should run");
}

#[test]
fn block_measures_example_runs() {
    block_measures_example::run_example().expect("block_measures example should run");
}

#[test]
fn measure_tree_example_runs() {
    measure_tree_example::run_example().expect("measure_tree example should run");
}

#[test]
fn sampling_example_runs() {
    sampling_example::run_example().expect("sampling example should run");
}

#[test]
fn scales_example_runs() {
    scales_example::run_example().expect("scales example should run");
}

#[test]
fn ball_conditions_example_runs() {
    ball_conditions_example::run_example().expect("ball_conditions example should run");
}

#[test]
fn dim_bad_example_runs() {
    dim_bad_example::run_example().expect("dim_bad example should run");
}

#[test]
fn van_der_corput_example_runs() {
    van_der_corput_example::run_example().expect("van_der_corput example should run");
}

#[test]
fn f_xi_m2_example_runs() {
    f_xi_m2_example::run_example().expect("f_xi_m2 example should run");
}

#[test]
fn qr_lemma_example_runs() {
    qr_lemma_example::run_example().expect("qr_lemma example should run");
}

#[test]
fn approx_error_example_runs() {
    approx_error_example::run_example().expect("approx_error example should run");
}

#[test]
fn fourier_decay_example_runs() {
    fourier_decay_example::run_example().expect("fourier_decay example should run");
}

#[test]
fn normality_example_runs() {
    normality_example::run_example().expect("normality example should run");
}

#[test]
fn run_pipeline_example_runs() {
    run_pipeline_example::run_example().expect("run_pipeline example should run");
}

#[test]
fn calibrate_example_runs() {
    calibrate_example::run_example().expect("calibrate example should run");
}
