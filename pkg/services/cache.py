"""扫描结果磁盘缓存服务"""
from typing import Optional, Dict, Any
import glob
import hashlib
import json
import logging
import os

logger = logging.getLogger(__name__)


class RunCache:
    """
    磁盘运行结果缓存

    每个键一个 JSON 文件，放在 cache_dir 下，跨进程、跨次扫描复用。
    读到损坏的文件时视为未命中。
    """

    def __init__(self, cache_dir: str):
        self.cache_dir = cache_dir
        os.makedirs(cache_dir, exist_ok=True)

    def _generate_key(self, prefix: str, **params) -> str:
        """生成缓存键（使用 SHA256）"""
        key_data = f"{prefix}:{json.dumps(params, sort_keys=True, default=str)}"
        return hashlib.sha256(key_data.encode()).hexdigest()

    def _path(self, key: str) -> str:
        return os.path.join(self.cache_dir, f"{key}.json")

    def get(self, prefix: str, **params) -> Optional[Dict[str, Any]]:
        """获取缓存"""
        path = self._path(self._generate_key(prefix, **params))
        if not os.path.exists(path):
            return None
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"缓存文件无法读取，忽略: {path} ({e})")
            return None
        logger.debug(f"缓存命中: {prefix}")
        return data

    def set(self, prefix: str, data: Dict[str, Any], **params) -> None:
        """设置缓存，先写临时文件再替换"""
        path = self._path(self._generate_key(prefix, **params))
        tmp = f"{path}.tmp"
        with open(tmp, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False)
        os.replace(tmp, path)
        logger.debug(f"缓存写入: {prefix}")

    def __len__(self) -> int:
        return len(glob.glob(os.path.join(self.cache_dir, '*.json')))

    def clear(self) -> None:
        """清空缓存"""
        for path in glob.glob(os.path.join(self.cache_dir, '*.json')):
            os.remove(path)
        logger.info(f"已清空缓存目录: {self.cache_dir}")
