"""子命令工具模块 - 错误处理和输出"""
from functools import wraps
import json
import logging
import sys

from errors import EXIT_INTERNAL, ConfigError, LabError, NumericalError

logger = logging.getLogger(__name__)


def emit_error(error: LabError, stream=None) -> int:
    """统一错误输出格式: stderr 上一行 JSON，返回退出码"""
    stream = stream or sys.stderr
    logger.error(f"Lab Error: {error.message}")
    stream.write(json.dumps(error.to_dict(), ensure_ascii=False, default=str) + "\n")
    stream.flush()
    return error.exit_code


def handle_lab_error(func):
    """处理子命令异常，转换为退出码"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except LabError as e:
            return emit_error(e)
        except ValueError as e:
            return emit_error(ConfigError(f"参数格式错误: {str(e)}"))
        except FloatingPointError as e:
            return emit_error(NumericalError(f"浮点运算异常: {str(e)}"))
        except Exception as e:
            logger.exception("子命令执行异常")
            return emit_error(LabError(f"内部错误: {str(e)}", exit_code=EXIT_INTERNAL))
    return wrapper


def print_json(data, stream=None) -> None:
    """结果 JSON 输出到 stdout"""
    stream = stream or sys.stdout
    stream.write(json.dumps(data, indent=2, ensure_ascii=False, default=str) + "\n")


def parse_float_list(text: str, name: str) -> tuple:
    """解析逗号分隔的数值列表，如 "0,0.5,1" """
    items = [s.strip() for s in text.split(',') if s.strip()]
    try:
        return tuple(float(s) for s in items)
    except ValueError:
        raise ConfigError(f"{name} 必须是逗号分隔的数值: {text!r}")


def parse_point(text: str) -> tuple:
    """解析 "u,v" 形式的初始点"""
    values = parse_float_list(text, 'start')
    if len(values) != 2:
        raise ConfigError(f"start 必须是 u,v 两个数值: {text!r}")
    return values
