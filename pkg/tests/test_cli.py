import json

import pytest

from gtkit import gentorsion as gt
from gtkit.amalgam import element_from_free_word, free_as_free_product
from gtkit.cli import main
from gtkit.word import parse_word as W


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture()
def bs2_files(tmp_path):
    G, cert = gt.bs_commutator_witness(2)
    return (
        write(tmp_path, "bs2.json", G.to_json()),
        write(tmp_path, "bs2_cert.json", cert.to_json()),
    )


def test_verify_good_certificate(bs2_files, capsys):
    group, cert = bs2_files
    assert main(["verify", "--group", group, "--cert", cert]) == 0
    assert json.loads(capsys.readouterr().out)["verified"] is True


def test_verify_bad_certificate(tmp_path, capsys):
    F = free_as_free_product(["a", "b"])
    cert = gt.GtCertificate(element_from_free_word(F, W("a")), [F.identity()])
    group = write(tmp_path, "free2.json", F.to_json())
    certf = write(tmp_path, "bad.json", cert.to_json())
    assert main(["verify", "--group", group, "--cert", certf]) == 1


def test_verify_ncl(tmp_path):
    from gtkit import casestudy as cs

    w = gt.NclWitness(cs.gamma_alpha(), [(0, -1, W("a[0] a[2]"))])
    data = w.to_json()
    data["relators"] = [str(cs.gamma_relator())]
    ncl = write(tmp_path, "alpha.json", data)
    assert main(["verify", "--ncl", ncl]) == 0


def test_verify_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--group", str(bad), "--cert", str(bad)]) == 2


def test_search_gt_found(bs2_files, tmp_path, capsys):
    group, _ = bs2_files
    out = str(tmp_path / "cert_out.json")
    code = main([
        "search", "gt", "--group", group,
        "--elem", "[A: a][B: b][A: a^-1][B: b^-1]",
        "--max-n", "2", "--radius", "1", "--out", out,
    ])
    assert code == 1
    data = json.loads(open(out).read())
    assert data["found"] and len(data["certificate"]["conjugators"]) == 2


def test_search_gt_none_found(tmp_path):
    F = free_as_free_product(["a", "b"])
    group = write(tmp_path, "free2.json", F.to_json())
    code = main([
        "search", "gt", "--group", group, "--elem", "[A: a]",
        "--max-n", "3", "--radius", "1", "--elt-letters", "1",
    ])
    assert code == 0


def test_search_rtf_violation(tmp_path, capsys):
    group = write(tmp_path, "z.json", {
        "kind": "free", "alphabet": ["a"], "subgroup": ["a^2"],
    })
    code = main(["search", "rtf", "--group", group,
                 "--radius", "2", "--max-k", "2", "--elt-letters", "1"])
    assert code == 1


def test_search_rtf_clean(tmp_path):
    group = write(tmp_path, "f.json", {
        "kind": "free", "alphabet": ["a", "b"], "subgroup": ["a"],
    })
    code = main(["search", "rtf", "--group", group,
                 "--radius", "2", "--max-k", "2", "--elt-letters", "2"])
    assert code == 0


def test_search_multimal(tmp_path):
    group = write(tmp_path, "z.json", {
        "kind": "free", "alphabet": ["a"], "subgroup": ["a^2"],
    })
    code = main(["search", "multimal", "--group", group, "--seeds", "a^2",
                 "--radius", "1", "--max-n", "2", "--elt-letters", "1"])
    assert code == 1


def test_build_w_and_abelianize(tmp_path, capsys):
    out = str(tmp_path / "w.json")
    assert main(["build", "w", "--out", out]) == 0
    assert main(["abelianize", "--pres", out]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["trivial"] is True


def test_build_nonlo_and_rtf_view(tmp_path):
    out = str(tmp_path / "nonlo.json")
    assert main(["build", "nonlo", "--s", "10", "--m", "8", "--seed", "0",
                 "--out", out]) == 0
    code = main(["search", "rtf", "--group", out,
                 "--radius", "1", "--max-k", "1", "--elt-letters", "1",
                 "--node-cap", "30000"])
    assert code in (0, 2)  # none found; 2 when the cap bites first


def test_build_nonlo_small_s_rejected(capsys):
    assert main(["build", "nonlo", "--s", "5"]) == 2


def test_suite_unknown_exit_2():
    assert main(["suite", "nosuch"]) == 2


def test_suite_single_ok(tmp_path, capsys):
    out = str(tmp_path / "rep.json")
    assert main(["suite", "magnus_inverse", "--trials", "40", "--seed", "1",
                 "--out", out]) == 0
    data = json.loads(open(out).read())
    assert data["ok"] and data["reports"][0]["violations"] == []


def test_suite_reports_are_deterministic(tmp_path):
    a = str(tmp_path / "a.json")
    b = str(tmp_path / "b.json")
    main(["suite", "length_subadditivity", "--trials", "30", "--seed", "5",
          "--out", a])
    main(["suite", "length_subadditivity", "--trials", "30", "--seed", "5",
          "--out", b])
    assert open(a).read() == open(b).read()
