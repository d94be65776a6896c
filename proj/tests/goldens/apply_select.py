def foo(row):
  if row['A'] == row['B'] and row['A'] < row['C']:
    return 'X'
  elif row['A'].startswith('Y'):
    return 'Y'
  elif row['B'] in ls:
    return 'Z'
  else:
    return 'NA'

try:
    import pandas as __cellrw_pd
    import numpy as __cellrw_np
    import inspect as __cellrw_inspect
    import hashlib as __cellrw_hashlib
    import ast as __cellrw_ast
    import textwrap as __cellrw_textwrap
    __cellrw_ok = isinstance(df, __cellrw_pd.DataFrame) and df.shape[0] > 0 and df.columns.is_unique and (df['A'].dtype == object) and (__cellrw_pd.api.types.infer_dtype(df['A'], skipna=False) == 'string') and isinstance(ls, (list, tuple, set, frozenset)) and __cellrw_inspect.isfunction(foo) and (__cellrw_hashlib.sha256(__cellrw_ast.unparse(__cellrw_ast.parse(__cellrw_textwrap.dedent(__cellrw_inspect.getsource(foo)))).encode()).hexdigest() == '918bcce53f3657f0a25bfa63fc14812f05df94ca94b1a12b879ce797113d685e')
except Exception:
    __cellrw_ok = False
if __cellrw_ok:
    __cellrw_conditions = [(df['A'] == df['B']) & (df['A'] < df['C']), df['A'].str.startswith('Y'), df['B'].isin(ls)]
    __cellrw_choices = ['X', 'Y', 'Z']
    __cellrw_res = __cellrw_pd.Series(__cellrw_np.select(__cellrw_conditions, __cellrw_choices, default='NA'), index=df.index)
else:
    __cellrw_res = df.apply(foo, axis=1)
__cellrw_res
