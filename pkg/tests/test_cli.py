import pytest

from flac.cli import FAILED, OK, USAGE, main
from flac.suites import CORPUS, load_config
from flac.syntax import parse_principal

C = str(CORPUS)


def flac(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_prints_signature(capsys):
    code, out, _ = flac(capsys, "check", f"{C}/lib/commit.flac")
    assert code == OK
    assert out.strip() == "forall N [p<-]. forall X [p<-]. N [p<-]-> p-> says X [p<-]-> p says (N * X)"


def test_check_reports_failed_premise(capsys):
    code, out, _ = flac(capsys, "check", f"{C}/reveal_wrapper.flac")
    assert code == FAILED
    assert "Assume.pc≽∇(q)" in out


def test_check_empty_file_is_a_parse_error(capsys, tmp_path):
    f = tmp_path / "empty.flac"
    f.write_text("")
    code, _, err = flac(capsys, "check", str(f))
    assert code == USAGE and "parse error" in err


def test_check_flags_override_headers(capsys, tmp_path):
    f = tmp_path / "relabel.flac"
    f.write_text("bind x' = x in eta[q<-] x'\n")
    code, _, _ = flac(capsys, "check", str(f), "--gamma", "[x : p<- says unit]", "--pc", "q<-")
    assert code == FAILED
    code, out, _ = flac(capsys, "check", str(f), "--gamma", "[x : p<- says unit]", "--pc", "q<-",
                        "--context", "[p<- |> q<-]")
    assert code == OK and out.strip() == "q<- says unit"


def test_check_with_harness(capsys):
    code, out, _ = flac(capsys, "check", f"{C}/rd_declassify.flac", "--harness", "bob<- /\\ alice->", "conf")
    assert code == OK and out.strip() == "bob says (unit + unit)"
    code, _, _ = flac(capsys, "check", f"{C}/rd_declassify.flac")
    assert code == FAILED


def test_run_with_trace(capsys):
    code, out, _ = flac(capsys, "run", "--trace", f"{C}/assume_demo.flac")
    lines = out.strip().splitlines()
    assert code == OK
    assert lines[0].startswith("#0 ")
    assert lines[1].startswith("#1 [E-Assume] ")
    assert lines[-1] == "sealed[q<-] unit where <p<- |> q<->"


def test_run_out_of_fuel(capsys):
    code, out, _ = flac(capsys, "run", "--fuel", "1", f"{C}/commit_run.flac")
    assert code == FAILED and "did not reach a value" in out


def test_run_projection(capsys):
    assert flac(capsys, "run", f"{C}/proj1_pair.flac")[1].strip() == "unit"


def test_observe_as_q_and_p(capsys):
    _, as_q, _ = flac(capsys, "observe", f"{C}/commit_run.flac", "--as", "q")
    _, as_p, _ = flac(capsys, "observe", f"{C}/commit_run.flac", "--as", "p", "--proj", "conf")
    assert as_q.strip().splitlines()[-1].endswith("∘")
    assert as_p.strip().splitlines()[-1] == "#13 sealed[p] <unit, inj1[unit + unit] unit>"
    assert "∘" not in as_p


def test_observe_bad_projection(capsys):
    code, _, err = flac(capsys, "observe", f"{C}/commit_run.flac", "--as", "q", "--proj", "sideways")
    assert code == USAGE


@pytest.mark.parametrize("cmd, suite", [("ni", "commit_secrecy"), ("ni", "commit_integrity"),
                                        ("ni", "bearer"), ("ni", "leak"), ("rd", "rd_declassify")])
def test_suites_as_expected(capsys, cmd, suite):
    code, out, _ = flac(capsys, cmd, f"{C}/{suite}.flactest")
    assert code == OK, out
    assert "as expected" in out.splitlines()[-1]


def test_suite_kind_mismatch(capsys):
    code, _, err = flac(capsys, "rd", f"{C}/leak.flactest")
    assert code == USAGE and "not 'rd'" in err


def test_corpus(capsys):
    code, out, _ = flac(capsys, "corpus")
    assert code == OK, out


def test_fuzz_is_seeded(capsys):
    a = flac(capsys, "fuzz", "--count", "30", "--bracketed", "10", "--seed", "3")
    b = flac(capsys, "fuzz", "--count", "30", "--bracketed", "10", "--seed", "3")
    assert a == b and a[0] == OK
    assert "seed 3" in a[1]


def test_unknown_command(capsys):
    assert flac(capsys, "frobnicate")[0] == USAGE


def test_config_file(tmp_path, capsys):
    f = tmp_path / "flac.toml"
    f.write_text('[flac]\npcmost = "p<-"\nfuel = 5\nseed = 9\nfactorization_bound = 12\n')
    cfg = load_config(f)
    assert cfg.pc_most == parse_principal("p<-")
    assert (cfg.fuel, cfg.seed, cfg.factorization_bound) == (5, 9, 12)
    code, out, _ = flac(capsys, "run", "--config", str(f), f"{C}/commit_run.flac")
    assert code == FAILED
    code, _, _ = flac(capsys, "run", "--config", str(tmp_path / "missing.toml"), f"{C}/commit_run.flac")
    assert code == USAGE
