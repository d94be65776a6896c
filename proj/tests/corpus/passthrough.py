# %%
import pandas as pd
import numpy as np
# %%
%matplotlib inline
import matplotlib.pyplot as plt
# %%
!pip install seaborn
# %%
df = pd.read_csv('train.csv')  # load the data
df.head()
# %%
df.info()
df.describe(include='all')
# %%
# only comments here
# nothing to run
# %%
df.shape
# %%
df.isnull().sum().sort_values(ascending=False)
# %%
df.sort_values('A').head()
# %%
df['A'].sort_values(ascending=False).head(n=5)
# %%
df['A'].sort_values().tail(n=5)
# %%
s = df['A'].sort_values()
top = s.head(n=5)
# %%
parts = df['C'].str.split(',', expand=True)
# %%
a, b = df['C'].str.split('(', 2, expand=True)
# %%
x, x = df['C'].str.split('(', 1, expand=True)
# %%
df[['a', 'a']] = df['C'].str.split('(', n=1, expand=True)
# %%
a, b = df['C'].str.split('ab', 1, expand=True, regex=True)
# %%
a, b = df['C'].str.split(sep, 1, expand=True)
# %%
first = df['C'].str.split('(').str[0]
# %%
combined = pd.Series(df['A'].tolist() + extra)
# %%
combined = pd.Series(df['A'].tolist() + df['B'].values.tolist() * 2)
# %%
lst = df['A'].tolist() + df['B'].tolist()
# %%
df.apply(lambda r: r['a'] + r['b'], axis=1)
# %%
df.apply(np.sum, axis=0)
# %%
df.apply(undefined_function, axis=1)
# %%
def slow(row):
    total = 0
    for v in row:
        total += v
    return total

df.apply(slow, axis=1)
# %%
def pick(row, default):
    return row['A'] if row['A'] > 0 else default
# %%
@functools.lru_cache
def cached(row):
    return row['A'] * 2

df.apply(cached, axis=1)
# %%
df['text'].apply(lambda x: x in 'needle')
# %%
df['text'].apply(lambda x: 'needle' in y)
# %%
df['text'].apply(len)
# %%
df['text'].map(lambda x: 'needle' in x)
# %%
result = [c for c in df.columns if c.startswith('feat_')]
# %%
for col in df.columns:
    if df[col].dtype == object:
        df[col] = df[col].fillna('missing')
# %%
while queue:
    item = queue.pop()
    process(item)
# %%
with open('out.txt', 'w') as fh:
    fh.write(f"{len(df)} rows, {df.shape[1]} cols\n")
# %%
class Model:
    """Tiny wrapper."""

    def __init__(self, df):
        self.df = df

    def top(self):
        return self.df['A'].sort_values().head(n=5)
# %%
try:
    value = compute()
except (KeyError, ValueError) as err:
    print('failed:', err)
finally:
    cleanup()
# %%
async def fetch(session, url):
    async with session.get(url) as resp:
        return await resp.text()
# %%
match command.split():
    case ['go', direction]:
        move(direction)
    case ['quit'] | ['exit']:
        stop()
    case _:
        print('unknown')
# %%
if (n := len(df)) > 10:
    print(f'{n=}')
# %%
x = 1; y = df['A'].sort_values().head(n=5)
# %%
lambda_table = {k: (lambda v, k=k: v * k) for k in range(3)}
# %%
values = np.where(df['A'] > 0, 'pos', 'neg')
df['sign'] = values
# %%
df.groupby('key').agg({'A': 'mean', 'B': ['min', 'max']})
# %%
pivot = df.pivot_table(index='day',
                       columns='hour',   # wide
                       values='count',
                       aggfunc='sum')
# %%
total = (df['A']
         + df['B']
         - df['C'])
# %%
s = 'multi\
line'
# %%
text = """
df['A'].sort_values().head(n=5)
"""
# %%
print('hi')
# %%
plt.figure(figsize=(10, 6))
plt.plot(df['A'])
plt.show()
# %%
df.to_csv('out.csv', index=False)
# %%
__cellrw_res = df['A'].sort_values().head(n=5)
# %%
del df['tmp']
global_counter = 0
# %%
assert df['A'].is_unique, 'duplicate ids'
# %%
from collections import Counter, defaultdict as dd
counts = Counter(df['word'])
# %%
raise SystemExit
# %%
df.loc[df['A'] > 3, 'B'] = 0
# %%
df = df[~df['C'].isin(['x', 'y'])]
# %%
	x = 1
# %%
print("unterminated
# %%
def f(x):
    return x ** 2

df['sq'] = df['A'].apply(f)
