"""错误处理与退出码测试"""
import io
import json

import pytest

from commands.utils import emit_error, handle_lab_error, parse_float_list, parse_point
from errors import (
    EXIT_INSUFFICIENT_DATA,
    EXIT_INTERNAL,
    EXIT_NUMERICAL,
    EXIT_VALIDATION,
    BoundaryContaminationError,
    ConfigError,
    InvalidInsetError,
    LabError,
    NoFrontError,
)
from run_config import validate_required


def test_lab_error_creation():
    """测试错误创建"""
    error = LabError("测试错误", 4)
    assert error.message == "测试错误"
    assert error.exit_code == 4


def test_subclass_exit_codes():
    """测试各类错误的退出码"""
    assert ConfigError("x").exit_code == EXIT_VALIDATION
    assert InvalidInsetError("x").exit_code == EXIT_VALIDATION
    assert BoundaryContaminationError("x").exit_code == EXIT_NUMERICAL
    assert NoFrontError("x").exit_code == EXIT_INSUFFICIENT_DATA


def test_error_to_dict_includes_payload():
    """测试错误序列化带附加信息"""
    error = BoundaryContaminationError("到达边界", payload={'t': 12.5, 'side': 'right'})
    data = error.to_dict()

    assert data['error'] == "到达边界"
    assert data['code'] == EXIT_NUMERICAL
    assert data['type'] == 'BoundaryContaminationError'
    assert data['t'] == 12.5
    assert data['side'] == 'right'


def test_validate_required_pass():
    """测试参数验证通过"""
    validate_required({'eps1': 1.0, 'eps2': 0.0}, ['eps1', 'eps2'])


def test_validate_required_fail():
    """测试参数验证失败"""
    with pytest.raises(ConfigError) as exc_info:
        validate_required({'eps1': 1.0}, ['eps1', 'eps2'])

    assert '缺少必需参数' in exc_info.value.message
    assert 'eps2' in exc_info.value.message


def test_emit_error_writes_json():
    """测试错误 JSON 写到 stderr"""
    stream = io.StringIO()
    code = emit_error(ConfigError("未知键", payload={'unknown_keys': ['foo']}), stream)

    assert code == EXIT_VALIDATION
    data = json.loads(stream.getvalue())
    assert data['error'] == "未知键"
    assert data['code'] == EXIT_VALIDATION
    assert data['unknown_keys'] == ['foo']


@pytest.mark.parametrize("exc, expected", [
    (NoFrontError("no front"), EXIT_INSUFFICIENT_DATA),
    (ValueError("bad"), EXIT_VALIDATION),
    (FloatingPointError("overflow"), EXIT_NUMERICAL),
    (RuntimeError("boom"), EXIT_INTERNAL),
])
def test_handle_lab_error_maps_exit_codes(exc, expected, capsys):
    """测试子命令异常转换为退出码"""
    @handle_lab_error
    def failing(args):
        raise exc

    assert failing(None) == expected
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err['code'] == expected


def test_handle_lab_error_passes_result():
    """测试正常返回值不被修改"""
    @handle_lab_error
    def ok(args):
        return 0

    assert ok(None) == 0


def test_parse_helpers():
    """测试命令行列表解析"""
    assert parse_float_list("0, 0.5,1", 'gammas') == (0.0, 0.5, 1.0)
    assert parse_point("0.1,0") == (0.1, 0.0)
    with pytest.raises(ConfigError):
        parse_point("1,2,3")
    with pytest.raises(ConfigError):
        parse_float_list("a,b", 'eps')
