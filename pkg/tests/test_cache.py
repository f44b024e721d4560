"""缓存服务测试"""
import os

from services.cache import RunCache


def test_cache_set_and_get(tmp_path):
    """测试缓存写入和读取"""
    cache = RunCache(str(tmp_path))

    cache.set('sweep_row', {'speed': 2.0}, gamma=0.0, eps=1.0)
    result = cache.get('sweep_row', gamma=0.0, eps=1.0)

    assert result == {'speed': 2.0}
    assert len(cache) == 1


def test_cache_key_ignores_param_order(tmp_path):
    """测试参数顺序不影响缓存键"""
    cache = RunCache(str(tmp_path))
    cache.set('sweep_row', {'row': 1}, gamma=1.0, eps=2.0)

    assert cache.get('sweep_row', eps=2.0, gamma=1.0) == {'row': 1}
    assert cache.get('sweep_row', gamma=1.0, eps=4.0) is None


def test_cache_nested_params(tmp_path):
    """测试嵌套配置字典作为键"""
    cache = RunCache(str(tmp_path))
    template = {'n': 2001, 'disturbance': {'width': 1.0}}
    cache.set('sweep_row', {'row': 1}, template=template)

    assert cache.get('sweep_row', template={'disturbance': {'width': 1.0}, 'n': 2001}) == {'row': 1}


def test_cache_survives_new_instance(tmp_path):
    """测试新的缓存实例能读到之前写入的结果"""
    RunCache(str(tmp_path)).set('sweep_row', {'speed': 6.5}, gamma=5.0, eps=1.0)

    assert RunCache(str(tmp_path)).get('sweep_row', gamma=5.0, eps=1.0) == {'speed': 6.5}


def test_cache_returns_fresh_copies(tmp_path):
    """测试修改读取结果不影响缓存内容"""
    cache = RunCache(str(tmp_path))
    cache.set('sweep_row', {'speed': 2.0}, key='k')

    first = cache.get('sweep_row', key='k')
    first['speed'] = -1.0

    assert cache.get('sweep_row', key='k') == {'speed': 2.0}


def test_cache_miss(tmp_path):
    """测试缓存未命中"""
    cache = RunCache(str(tmp_path))
    assert cache.get('nonexistent', key='miss') is None


def test_cache_corrupt_file_is_miss(tmp_path):
    """测试损坏的缓存文件视为未命中"""
    cache = RunCache(str(tmp_path))
    cache.set('test', {'data': 'value'}, key='bad')
    path = next(p for p in os.listdir(tmp_path) if p.endswith('.json'))
    (tmp_path / path).write_text('{not json', encoding='utf-8')

    assert cache.get('test', key='bad') is None


def test_cache_clear(tmp_path):
    """测试清空缓存"""
    cache = RunCache(str(tmp_path / 'nested'))
    cache.set('test', {'data': 'value'}, key='clear')
    cache.clear()

    assert cache.get('test', key='clear') is None
    assert len(cache) == 0
