use nib_web::{adjoint_cell, check_generator, classification_row};

#[test]
fn scaling_generator_for_a_power_law() {
    let v = check_generator("u^2", "u", r#"{"t":"-t","u":"u"}"#).unwrap();
    assert_eq!(v["verdict"], "proven-symmetry");
    let w = check_generator("u^2", "u", r#"{"u":"1"}"#).unwrap();
    assert_ne!(w["verdict"], "proven-symmetry");
    assert!(w["residual"].is_string());
}

#[test]
fn adjoint_cell_is_rendered() {
    let v = adjoint_cell("X4", "X1").unwrap();
    assert_eq!(v["value"], "exp(s) X1");
}

#[test]
fn corrected_row() {
    let v = classification_row(23).unwrap();
    assert_eq!(v["status"], "fail");
    assert!(!v["correction"].is_null());
}
