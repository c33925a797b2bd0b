import json
import os
import signal
import subprocess
import sys
import time

import pytest

from gae2e.cli import main
from gae2e.runlog import read_eval_log


def _run(*argv, **kw):
    return subprocess.run([sys.executable, "-m", "gae2e", *argv], capture_output=True, text=True, timeout=120, **kw)


def _logs(tmp_path, tag):
    return ["--eval-log", str(tmp_path / f"{tag}.jsonl"), "--summary-csv", str(tmp_path / f"{tag}.csv")]


def test_search_sphere(tmp_path, capsys):
    assert main(["search", "--landscape", "sphere", "--pop", "20", "--gens", "15", *_logs(tmp_path, "a")]) == 0
    out = capsys.readouterr()
    assert "best fitness:" in out.out and "pos-cls-weight" in out.out
    assert "effective config" in out.err
    _, records = read_eval_log(tmp_path / "a.jsonl")
    assert len(records) == 300


def test_missing_evaluator_is_config_error(tmp_path):
    proc = _run("search", *_logs(tmp_path, "x"))
    assert proc.returncode == 1 and "usage:" in proc.stderr


def test_bad_flag_and_missing_subcommand_exit_one():
    assert _run("search", "--pop", "many").returncode == 1
    assert _run().returncode == 1


def test_master_requires_bind_and_worker_requires_master(tmp_path):
    assert main(["master", "--landscape", "sphere", *_logs(tmp_path, "m")]) == 1
    assert main(["worker"]) == 1


def test_existing_log_needs_overwrite(tmp_path):
    args = ["search", "--landscape", "sphere", "--pop", "4", "--gens", "2", *_logs(tmp_path, "o")]
    assert main(args) == 0
    assert main(args) == 1
    assert main(args + ["--overwrite"]) == 0


def test_settings_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pop": 30, "gens": 5, "seed": 9}))
    monkeypatch.setenv("GA_E2E_GENS", "7")
    monkeypatch.setenv("GA_E2E_SEED", "11")
    assert main(["--config", str(cfg), "search", "--seed", "13", "--show-config"]) == 0
    shown = json.loads(capsys.readouterr().out)
    assert (shown["pop"], shown["gens"], shown["seed"]) == (30, 7, 13)
    assert shown["eta_c"] == 20.0 and shown["pc"] == 0.9


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"populaton": 30}))
    assert main(["--config", str(cfg), "search", "--show-config"]) == 1


def test_baseline_defaults_need_flag(capsys):
    assert main(["baseline"]) == 1
    assert "outside the search bounds" in capsys.readouterr().err
    assert main(["baseline", "--allow-out-of-bounds"]) == 0
    assert "test AUC:" in capsys.readouterr().out


def test_baseline_vector_and_from_log(tmp_path, capsys):
    assert main(["baseline", "--vector", "0.948,0.319,0.269,0.225,0.0008,0.475"]) == 0
    assert "test AUC: 0.253333" in capsys.readouterr().out
    assert main(["baseline", "--vector", "0.1,0.2"]) == 1
    assert main(["search", "--landscape", "sphere", "--pop", "6", "--gens", "2", *_logs(tmp_path, "b")]) == 0
    capsys.readouterr()
    assert main(["baseline", "--from-log", str(tmp_path / "b.jsonl")]) == 0
    assert "best of" in capsys.readouterr().out


def test_report(tmp_path, capsys):
    main(["search", "--landscape", "sphere", "--pop", "70", "--gens", "70", "--seed", "1", *_logs(tmp_path, "r")])
    capsys.readouterr()
    assert main(["report", str(tmp_path / "r.jsonl")]) == 0
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("best fitness:"))
    assert float(line.split()[2]) >= 0.999
    assert main(["report", str(tmp_path / "missing.jsonl")]) == 2


def test_external_evaluator_from_cli(tmp_path, capsys):
    from conftest import stub_command

    args = ["search", "--evaluator", "external", "--command", stub_command("echo_fitness.py", "0.5"),
            "--pop", "4", "--gens", "2", *_logs(tmp_path, "e")]
    assert main(args) == 0
    assert "best fitness: 0.500000" in capsys.readouterr().out


def _free_port():
    import socket

    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return port


def test_master_and_worker_processes_match_local(tmp_path):
    common = ["--landscape", "sphere", "--pop", "10", "--gens", "5", "--seed", "3"]
    assert _run("search", *common, *_logs(tmp_path, "local")).returncode == 0
    port = _free_port()
    workers = [
        subprocess.Popen([sys.executable, "-m", "gae2e", "worker", "--master", f"127.0.0.1:{port}", "--heartbeat", "0.5"],
                         stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
        for _ in range(2)
    ]
    master = _run("master", "--bind", f"127.0.0.1:{port}", *common, *_logs(tmp_path, "dist"))
    codes = [w.wait(timeout=30) for w in workers]
    assert master.returncode == 0 and codes == [0, 0]

    def strip(path):
        _, recs = read_eval_log(path)
        return [(r.eval_id, r.chromosome, r.fitness, r.status) for r in recs]

    assert strip(tmp_path / "local.jsonl") == strip(tmp_path / "dist.jsonl")
    assert (tmp_path / "local.csv").read_text() == (tmp_path / "dist.csv").read_text()


@pytest.mark.skipif(os.name != "posix", reason="needs POSIX signals")
def test_sigint_on_master_shuts_workers_down(tmp_path):
    port = _free_port()
    master = subprocess.Popen(
        [sys.executable, "-m", "gae2e", "master", "--bind", f"127.0.0.1:{port}", "--evaluator", "external",
         "--command", f"{sys.executable} -c \"import time; time.sleep(30)\"", "--pop", "4", "--gens", "2",
         *_logs(tmp_path, "s")],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
    )
    worker = subprocess.Popen([sys.executable, "-m", "gae2e", "worker", "--master", f"127.0.0.1:{port}"],
                              stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    time.sleep(2.0)
    master.send_signal(signal.SIGINT)
    _, err = master.communicate(timeout=20)
    assert master.returncode == 2 and "shut down" in err
    worker.wait(timeout=20)
    assert worker.returncode == 0


def test_surrogate_search_full_size(tmp_path, capsys):
    args = ["search", "--evaluator", "surrogate", "--fitness-source", "mean_val_auc", *_logs(tmp_path, "s")]
    assert main(args) == 0
    _, records = read_eval_log(tmp_path / "s.jsonl")
    assert len(records) == 4900


def test_baseline_defaults_value_is_pinned(capsys):
    assert main(["baseline", "--allow-out-of-bounds"]) == 0
    out = capsys.readouterr().out
    assert "epochs run: 21 (stage 1: 11, stage 2: 10)" in out
    assert "test AUC: 0.256250" in out
