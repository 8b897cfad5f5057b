use nib_symmetry::liealg::{
    adjoint_table, bracket, commutator_table, compare_table, jacobiator, printed_table, CellVerdict, LieBasis, TableKind,
};

#[test]
fn l10_commutators_against_print() {
    let basis = LieBasis::l10();
    let table = commutator_table(&basis).unwrap();
    assert_eq!(table.closed_count(), 100);
    assert!(table.antisymmetry_failures().unwrap().is_empty());
    assert!(table.jacobi_failures().unwrap().is_empty());
    let diff = compare_table(&table, &printed_table(&basis, TableKind::Commutator).unwrap()).unwrap();
    println!("{}", diff.to_markdown());
    let x89 = diff.cell("X8", "X9").unwrap();
    assert_eq!(x89.verdict, CellVerdict::Mismatch);
    assert_eq!(x89.computed, "-X7 + X10");
}

#[test]
fn l10_adjoint_against_print() {
    let basis = LieBasis::l10();
    let table = adjoint_table(&commutator_table(&basis).unwrap()).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            assert!(table.checks(i, j).all(), "({i},{j}) {:?}", table.checks(i, j));
        }
    }
    let diff = compare_table(&table, &printed_table(&basis, TableKind::Adjoint).unwrap()).unwrap();
    println!("{}", diff.to_markdown());
    assert_eq!(table.render_cell(3, 0), "exp(s) X1");
}

#[test]
fn ibe_table_against_print() {
    let basis = LieBasis::ibe();
    let table = commutator_table(&basis).unwrap();
    assert_eq!(table.closed_count(), 16);
    let diff = compare_table(&table, &printed_table(&basis, TableKind::Commutator).unwrap()).unwrap();
    println!("{}", diff.to_markdown());
    assert!(table.antisymmetry_failures().unwrap().is_empty());
}

#[test]
fn equiv_table_against_print() {
    let basis = LieBasis::equiv();
    let table = commutator_table(&basis).unwrap();
    println!("{}", table.to_markdown());
    let diff = compare_table(&table, &printed_table(&basis, TableKind::Commutator).unwrap()).unwrap();
    println!("{}", diff.to_markdown());
}

#[test]
fn bracket_examples() {
    let b = LieBasis::l10();
    assert_eq!(bracket(&b.fields[0], &b.fields[3]).unwrap(), b.fields[0]);
    assert!(bracket(&b.fields[4], &b.fields[4]).unwrap().is_zero());
    assert!(jacobiator(&b.fields[4], &b.fields[7], &b.fields[8]).unwrap().is_zero());
}
