//! Drives the extension module from an embedded interpreter.

use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(_wittgr::_wittgr)(py);
        let env = PyDict::new(py);
        env.set_item("w", m).unwrap();
        if let Err(e) = py.run(code, Some(&env), None) {
            e.print(py);
            panic!("python check failed");
        }
    });
}

#[test]
fn witt_vectors_behave_like_integers_mod_p_power() {
    run(c"
V = w.WittVector
for a in range(27):
    for b in range(27):
        assert V.from_int(3, 3, a) * V.from_int(3, 3, b) == V.from_int(3, 3, a * b)
        assert V.from_int(3, 3, a) - V.from_int(3, 3, b) == V.from_int(3, 3, a - b)
assert V(2, 3, [1, 1, 0]).frobenius() == V(2, 3, [1, 1, 0])
assert V.from_int(2, 3, 4).valuation == 2
");
}

#[test]
fn errors_map_to_python_exceptions() {
    run(c"
for bad, exc in [(lambda: w.count_cell([1, 0], 6), ValueError),
                 (lambda: w.verify_famous_identity(2, 2), ArithmeticError),
                 (lambda: w.WittVector.from_int(2, 3, 2).inverse(), Exception)]:
    try:
        bad()
    except exc:
        pass
    else:
        raise AssertionError(bad)
");
}

#[test]
fn reports_are_plain_dicts() {
    run(c"
r = w.verify_minus_q('affine-a1', 6)
assert isinstance(r, dict) and r['failures'] == 0
t = w.KlTable('affine-a2')
assert t.polynomial('', '0,1,2,0,1') == [1, 1]
assert len(t) > 0
assert w.count_chain([[1, 0]] * 3, 3) == 64
");
}
