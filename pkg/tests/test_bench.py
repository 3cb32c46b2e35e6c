import csv
import io

from latsched.bench import RHO_FIELDS, RUNTIME_FIELDS, bench_rho, bench_runtime, write_csv


def rows(records, fields):
    buf = io.StringIO()
    write_csv(records, fields, buf)
    return list(csv.DictReader(io.StringIO(buf.getvalue())))


def test_runtime_smoke():
    out = rows(bench_runtime([8], [0.3], 1), RUNTIME_FIELDS)
    assert len(out) == 1
    assert float(out[0]["runtime_us"]) > 0
    assert list(out[0])[:7] == ["n", "density", "seed", "paths", "m", "runtime_us", "schedulable"]


def test_runtime_row_count():
    out = rows(bench_runtime([12, 14, 16], [0.4], 20), RUNTIME_FIELDS)
    assert len(out) == 60
    assert all(r["error"] == "" for r in out)


def test_runtime_errors_kept():
    out = rows(bench_runtime([8], [0.05], 2), RUNTIME_FIELDS)
    assert len(out) == 2
    assert all(r["error"].startswith("InfeasibleSpec") and r["runtime_us"] == "" for r in out)


def test_rho_rows():
    out = rows(bench_rho([12], [4, 3, 2], 3, mode="strict"), RHO_FIELDS)
    assert len(out) == 12
    for i in range(0, 12, 4):
        block = out[i : i + 4]
        assert block[0]["at_m"] == "True" and block[0]["procs"] == block[0]["m"]
        assert [r["procs"] for r in block[1:]] == ["4", "3", "2"]
    for r in out:
        if r["optimal"] == "True":
            assert float(r["rho1"]) >= 1.0 and float(r["rho2"]) >= 1.0


class Interrupt(Exception):
    pass


def test_stream_survives_interruption():
    buf = io.StringIO()

    def gen():
        yield from bench_runtime([10], [0.4], 2)
        raise Interrupt

    try:
        write_csv(gen(), RUNTIME_FIELDS, buf)
    except Interrupt:
        pass
    assert len(buf.getvalue().strip().splitlines()) == 3
