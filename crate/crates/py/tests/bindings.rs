use dendro_py::dendro_py;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run_python(code: &str) {
    pyo3::append_to_inittab!(dendro_py);
    Python::initialize();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python raised");
        }
    });
}

#[test]
fn module_round_trip() {
    run_python(
        r#"
import json
import dendro_py as d
assert d.degree("C2") == 1
assert len(d.trees(1, 1)) == 3
x = d.Presheaf.fixture("rep", "L2")
assert x.counts() == [3, 3, 1] and x.is_normal()
assert d.Presheaf.parse(x.to_text()).generators() == x.generators()
assert d.Presheaf.fixture("c2-quotient").counts() == [3, 1]
code, out = d.run(["fixtures", "list", "--json"])
assert code == 0 and json.loads(out)["status"] == "pass"
try:
    d.degree("(|")
    raise SystemExit("accepted a bad code")
except ValueError:
    pass
"#,
    );
}
